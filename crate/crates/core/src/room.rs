//! Rectangular single-façade room construction on top of an initial model.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::idf::{IdfDocument, IdfObject};
use crate::schedule::{support_objects, ALWAYS_ON_SCHEDULE};

pub const BUILDING_SURFACE: &str = "BuildingSurface:Detailed";
pub const FENESTRATION_SURFACE: &str = "FenestrationSurface:Detailed";
pub const SIMPLE_WINDOW: &str = "Window";
pub const INFILTRATION: &str = "ZoneInfiltration:DesignFlowRate";
pub const INFILTRATION_NAME: &str = "roomsim_infiltration";

pub const DEFAULT_MARGIN: f64 = 0.5;
pub const DEFAULT_GAP: f64 = 0.5;
/// Minimum clearance kept between window head and ceiling, and the lowest
/// sill the clamping rule will move a window down to.
const HEAD_CLEARANCE: f64 = 0.1;
/// Two window rectangles or a window and a wall edge may touch within this
/// distance and still count as fitting.
const FIT_TOLERANCE: f64 = 1e-9;
const RECTANGLE_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RoomError {
    #[error("no window surface found in the model")]
    NoWindowFound,
    #[error("window `{0}` is not an upright rectangle")]
    NonRectangularWindow(String),
    #[error("model must contain exactly one zone, found {0}")]
    ZoneCountMismatch(usize),
    #[error("window of height {window_height} m does not fit a wall of height {wall_height} m")]
    WindowTallerThanWall { window_height: f64, wall_height: f64 },
    #[error("model has no `Building` object")]
    MissingBuildingObject,
    #[error("infiltration rate must be non-negative, got {0}")]
    NegativeAch(f64),
    #[error("no {0} construction can be derived from the model")]
    MissingConstruction(&'static str),
    #[error("invalid room specification: {0}")]
    InvalidSpec(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoomSpec {
    /// Length of the exterior wall, m.
    pub width: f64,
    pub depth: f64,
    pub height: f64,
    /// Degrees clockwise from true north.
    #[serde(default)]
    pub orientation: f64,
    /// Air changes per hour.
    #[serde(default)]
    pub infiltration_ach: f64,
}

impl RoomSpec {
    pub fn validate(&self) -> Result<RoomSpec, RoomError> {
        for (label, v) in [("width", self.width), ("depth", self.depth), ("height", self.height)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(RoomError::InvalidSpec(format!("{label} must be > 0, got {v}")));
            }
        }
        if !self.orientation.is_finite() {
            return Err(RoomError::InvalidSpec("orientation must be finite".into()));
        }
        if !self.infiltration_ach.is_finite() || self.infiltration_ach < 0.0 {
            return Err(RoomError::NegativeAch(self.infiltration_ach));
        }
        Ok(RoomSpec {
            orientation: normalize_azimuth(self.orientation),
            ..*self
        })
    }

    pub fn volume(&self) -> f64 {
        self.width * self.depth * self.height
    }
}

pub fn normalize_azimuth(deg: f64) -> f64 {
    let a = deg.rem_euclid(360.0);
    if a >= 360.0 {
        0.0
    } else {
        a
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowTemplate {
    pub width: f64,
    pub height: f64,
    pub sill_height: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WallLayout {
    pub window_count: usize,
    /// Left edge of each window, measured from the left wall edge seen from outside.
    pub x_offsets: Vec<f64>,
    pub sill_height: f64,
    pub window_width: f64,
    pub window_height: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PackingRules {
    pub margin: f64,
    pub gap: f64,
}

impl Default for PackingRules {
    fn default() -> Self {
        PackingRules {
            margin: DEFAULT_MARGIN,
            gap: DEFAULT_GAP,
        }
    }
}

/// EnergyPlus field layouts that moved between versions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct ModelVersion {
    pub major: u32,
    pub minor: u32,
}

impl ModelVersion {
    pub const DEFAULT: ModelVersion = ModelVersion { major: 23, minor: 1 };

    pub fn of(doc: &IdfDocument) -> ModelVersion {
        doc.first_of("Version")
            .and_then(|v| v.field(0))
            .and_then(|s| {
                let mut parts = s.trim().split('.');
                let major = parts.next()?.trim().parse().ok()?;
                let minor = parts.next().and_then(|m| m.trim().parse().ok()).unwrap_or(0);
                Some(ModelVersion { major, minor })
            })
            .unwrap_or(Self::DEFAULT)
    }

    fn has_space_name(self) -> bool {
        self >= ModelVersion { major: 9, minor: 6 }
    }

    fn has_shading_control(self) -> bool {
        self < ModelVersion { major: 9, minor: 0 }
    }

    /// Index of "Number of Vertices" in `BuildingSurface:Detailed`.
    fn surface_vertex_count_index(self) -> usize {
        if self.has_space_name() {
            10
        } else {
            9
        }
    }

    fn surface_boundary_index(self) -> usize {
        if self.has_space_name() {
            5
        } else {
            4
        }
    }

    fn fenestration_vertex_count_index(self) -> usize {
        if self.has_shading_control() {
            9
        } else {
            8
        }
    }
}

pub type Vertex = [f64; 3];

fn read_vertices(object: &IdfObject, count_index: usize) -> Vec<Vertex> {
    let declared = object.field_f64(count_index).map(|n| n as usize);
    let coords: Vec<f64> = object.fields[count_index.min(object.fields.len())..]
        .iter()
        .skip(1)
        .map_while(|f| f.trim().parse().ok())
        .collect();
    let available = coords.len() / 3;
    let n = declared.unwrap_or(available).min(available);
    coords.chunks_exact(3).take(n).map(|c| [c[0], c[1], c[2]]).collect()
}

fn surface_vertices(object: &IdfObject, version: ModelVersion) -> Vec<Vertex> {
    read_vertices(object, version.surface_vertex_count_index())
}

fn min_z(vertices: &[Vertex]) -> f64 {
    vertices.iter().map(|v| v[2]).fold(f64::INFINITY, f64::min)
}

fn max_z(vertices: &[Vertex]) -> f64 {
    vertices.iter().map(|v| v[2]).fold(f64::NEG_INFINITY, f64::max)
}

/// Polygon area via Newell's normal.
pub fn polygon_area(vertices: &[Vertex]) -> f64 {
    let n = newell_normal(vertices);
    0.5 * (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt()
}

/// Unnormalized Newell normal; its direction follows the right-hand rule
/// over the vertex order.
pub fn newell_normal(vertices: &[Vertex]) -> Vertex {
    let mut n = [0.0; 3];
    for (i, a) in vertices.iter().enumerate() {
        let b = vertices[(i + 1) % vertices.len()];
        n[0] += (a[1] - b[1]) * (a[2] + b[2]);
        n[1] += (a[2] - b[2]) * (a[0] + b[0]);
        n[2] += (a[0] - b[0]) * (a[1] + b[1]);
    }
    n
}

/// Reads the size of the first window in document order.
pub fn extract_window_template(doc: &IdfDocument) -> Result<WindowTemplate, RoomError> {
    let version = ModelVersion::of(doc);
    let window = doc
        .objects
        .iter()
        .find(|o| {
            (o.is_class(FENESTRATION_SURFACE)
                && o.field(1).is_some_and(|t| t.eq_ignore_ascii_case("Window")))
                || o.is_class(SIMPLE_WINDOW)
        })
        .ok_or(RoomError::NoWindowFound)?;
    let name = window.name().unwrap_or_default().to_string();

    if window.is_class(SIMPLE_WINDOW) {
        let (Some(sill), Some(width), Some(height)) =
            (window.field_f64(6), window.field_f64(7), window.field_f64(8))
        else {
            return Err(RoomError::NonRectangularWindow(name));
        };
        if width <= 0.0 || height <= 0.0 || sill < 0.0 {
            return Err(RoomError::NonRectangularWindow(name));
        }
        return Ok(WindowTemplate {
            width,
            height,
            sill_height: sill,
        });
    }

    let vertices = read_vertices(window, version.fenestration_vertex_count_index());
    if vertices.len() != 4 {
        return Err(RoomError::NonRectangularWindow(name));
    }
    let (bottom, top) = (min_z(&vertices), max_z(&vertices));
    let levels_ok = vertices.iter().all(|v| {
        (v[2] - bottom).abs() <= RECTANGLE_TOLERANCE || (v[2] - top).abs() <= RECTANGLE_TOLERANCE
    });
    let on_bottom = vertices
        .iter()
        .filter(|v| (v[2] - bottom).abs() <= RECTANGLE_TOLERANCE)
        .count();
    if !levels_ok || on_bottom != 2 {
        return Err(RoomError::NonRectangularWindow(name));
    }
    let mut width: f64 = 0.0;
    for a in &vertices {
        for b in &vertices {
            width = width.max(((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt());
        }
    }
    let height = top - bottom;
    if width <= 0.0 || height <= 0.0 {
        return Err(RoomError::NonRectangularWindow(name));
    }
    let base_z = window
        .field(3)
        .and_then(|wall| doc.find_named(BUILDING_SURFACE, wall))
        .and_then(|h| doc.get(h))
        .map(|wall| surface_vertices(wall, version))
        .filter(|v| !v.is_empty())
        .map(|v| min_z(&v))
        .unwrap_or(0.0);
    Ok(WindowTemplate {
        width,
        height,
        sill_height: (bottom - base_z).max(0.0),
    })
}

fn group_width(n: usize, width: f64, gap: f64) -> f64 {
    if n == 0 {
        0.0
    } else {
        n as f64 * width + (n - 1) as f64 * gap
    }
}

fn fits(n: usize, available: f64, width: f64, gap: f64) -> bool {
    group_width(n, width, gap) <= available + FIT_TOLERANCE
}

/// Places as many template-sized windows as fit on a wall, centered, with
/// `gap` between neighbours and at least `margin` to each wall edge.
pub fn pack_windows(wall_width: f64, template: WindowTemplate, margin: f64, gap: f64) -> WallLayout {
    let available = wall_width - 2.0 * margin;
    let mut n = 0usize;
    if template.width > 0.0 && available + FIT_TOLERANCE >= template.width {
        let estimate = ((available + gap) / (template.width + gap)).floor().max(1.0) as usize;
        n = estimate;
        while fits(n + 1, available, template.width, gap) {
            n += 1;
        }
        while n > 0 && !fits(n, available, template.width, gap) {
            n -= 1;
        }
    }
    let start = (wall_width - group_width(n, template.width, gap)) / 2.0;
    let x_offsets = (0..n)
        .map(|i| start + i as f64 * (template.width + gap))
        .collect();
    WallLayout {
        window_count: n,
        x_offsets,
        sill_height: template.sill_height,
        window_width: template.width,
        window_height: template.height,
    }
}

/// Fits the template into a wall of the given height: the sill moves down
/// toward 0.1 m first, then the window height is capped.
pub fn clamp_template(template: WindowTemplate, wall_height: f64) -> Result<WindowTemplate, RoomError> {
    let limit = wall_height - HEAD_CLEARANCE;
    let mut t = template;
    if t.sill_height + t.height > limit {
        t.sill_height = t.sill_height.min(HEAD_CLEARANCE).max(limit - t.height);
    }
    if t.sill_height + t.height > limit {
        t.height = wall_height - 2.0 * HEAD_CLEARANCE;
        t.sill_height = t.sill_height.min(HEAD_CLEARANCE);
    }
    if t.height <= 0.0 || t.sill_height + t.height > limit + FIT_TOLERANCE {
        return Err(RoomError::WindowTallerThanWall {
            window_height: template.height,
            wall_height,
        });
    }
    Ok(t)
}

fn fmt_num(v: f64) -> String {
    let r = (v * 1e6).round() / 1e6;
    if r == 0.0 {
        "0".to_string()
    } else {
        format!("{r}")
    }
}

#[derive(Debug, Clone)]
struct Constructions {
    floor: String,
    ceiling: String,
    facade: String,
    interior_wall: String,
    window: Option<String>,
}

fn find_constructions(doc: &IdfDocument, version: ModelVersion) -> Result<Constructions, RoomError> {
    let surfaces: Vec<&IdfObject> = doc.objects_of(BUILDING_SURFACE).collect();
    let boundary = version.surface_boundary_index();
    let of = |pred: &dyn Fn(&IdfObject) -> bool| -> Option<String> {
        surfaces
            .iter()
            .find(|s| pred(s))
            .and_then(|s| s.field(2))
            .filter(|c| !c.is_empty())
            .map(str::to_string)
    };
    let is_type = |s: &IdfObject, t: &str| s.field(1).is_some_and(|v| v.eq_ignore_ascii_case(t));
    let outdoors = |s: &IdfObject| s.field(boundary).is_some_and(|v| v.eq_ignore_ascii_case("Outdoors"));
    let any = of(&|_| true);
    let exterior_wall = of(&|s| is_type(s, "Wall") && outdoors(s));
    let any_wall = of(&|s| is_type(s, "Wall"));
    let interior_wall = of(&|s| is_type(s, "Wall") && !outdoors(s));
    let facade = exterior_wall
        .or_else(|| any_wall.clone())
        .or_else(|| any.clone())
        .ok_or(RoomError::MissingConstruction("wall"))?;
    let window = doc
        .objects
        .iter()
        .find(|o| o.is_class(FENESTRATION_SURFACE) || o.is_class(SIMPLE_WINDOW))
        .and_then(|o| {
            let idx = if o.is_class(SIMPLE_WINDOW) { 1 } else { 2 };
            o.field(idx).filter(|c| !c.is_empty()).map(str::to_string)
        });
    Ok(Constructions {
        floor: of(&|s| is_type(s, "Floor")).unwrap_or_else(|| facade.clone()),
        ceiling: of(&|s| is_type(s, "Ceiling") || is_type(s, "Roof")).unwrap_or_else(|| facade.clone()),
        interior_wall: interior_wall.unwrap_or_else(|| facade.clone()),
        facade,
        window,
    })
}

fn surface_object(
    version: ModelVersion,
    name: &str,
    surface_type: &str,
    construction: &str,
    zone: &str,
    exterior: bool,
    vertices: &[Vertex],
) -> IdfObject {
    let mut fields: Vec<String> = vec![
        name.into(),
        surface_type.into(),
        construction.into(),
        zone.into(),
    ];
    if version.has_space_name() {
        fields.push(String::new());
    }
    fields.push(if exterior { "Outdoors" } else { "Adiabatic" }.into());
    fields.push(String::new());
    fields.push(if exterior { "SunExposed" } else { "NoSun" }.into());
    fields.push(if exterior { "WindExposed" } else { "NoWind" }.into());
    fields.push("autocalculate".into());
    fields.push(vertices.len().to_string());
    for v in vertices {
        fields.extend(v.iter().map(|c| fmt_num(*c)));
    }
    IdfObject::new(BUILDING_SURFACE, fields)
}

fn window_object(version: ModelVersion, name: &str, construction: &str, wall: &str, vertices: &[Vertex]) -> IdfObject {
    let mut fields: Vec<String> = vec![
        name.into(),
        "Window".into(),
        construction.into(),
        wall.into(),
        String::new(),
        "autocalculate".into(),
    ];
    if version.has_shading_control() {
        fields.push(String::new());
    }
    fields.push(String::new());
    fields.push("1".into());
    fields.push(vertices.len().to_string());
    for v in vertices {
        fields.extend(v.iter().map(|c| fmt_num(*c)));
    }
    IdfObject::new(FENESTRATION_SURFACE, fields)
}

pub fn zone_name(doc: &IdfDocument) -> Result<String, RoomError> {
    let zones: Vec<&IdfObject> = doc.objects_of("Zone").collect();
    if zones.len() != 1 {
        return Err(RoomError::ZoneCountMismatch(zones.len()));
    }
    Ok(zones[0].name().unwrap_or_default().to_string())
}

fn is_fenestration(o: &IdfObject) -> bool {
    ["FenestrationSurface:Detailed", "Window", "Door", "GlazedDoor"]
        .iter()
        .any(|c| o.is_class(c))
}

/// Rewrites the zone as a `width × depth × height` box whose wall at y = 0
/// is the only exterior surface, carrying the packed windows.
pub fn apply_room_geometry(
    doc: &IdfDocument,
    spec: &RoomSpec,
    template: WindowTemplate,
    rules: PackingRules,
) -> Result<IdfDocument, RoomError> {
    let spec = spec.validate()?;
    let zone = zone_name(doc)?;
    let version = ModelVersion::of(doc);
    let constructions = find_constructions(doc, version)?;
    let template = clamp_template(template, spec.height)?;
    let layout = pack_windows(spec.width, template, rules.margin, rules.gap);

    let (w, d, h) = (spec.width, spec.depth, spec.height);
    let facade_name = format!("{zone}_Facade");
    let mut surfaces = vec![
        surface_object(
            version,
            &format!("{zone}_Floor"),
            "Floor",
            &constructions.floor,
            &zone,
            false,
            &[[0.0, 0.0, 0.0], [0.0, d, 0.0], [w, d, 0.0], [w, 0.0, 0.0]],
        ),
        surface_object(
            version,
            &format!("{zone}_Ceiling"),
            "Ceiling",
            &constructions.ceiling,
            &zone,
            false,
            &[[0.0, d, h], [0.0, 0.0, h], [w, 0.0, h], [w, d, h]],
        ),
        surface_object(
            version,
            &facade_name,
            "Wall",
            &constructions.facade,
            &zone,
            true,
            &[[0.0, 0.0, h], [0.0, 0.0, 0.0], [w, 0.0, 0.0], [w, 0.0, h]],
        ),
        surface_object(
            version,
            &format!("{zone}_Wall_Right"),
            "Wall",
            &constructions.interior_wall,
            &zone,
            false,
            &[[w, 0.0, h], [w, 0.0, 0.0], [w, d, 0.0], [w, d, h]],
        ),
        surface_object(
            version,
            &format!("{zone}_Wall_Back"),
            "Wall",
            &constructions.interior_wall,
            &zone,
            false,
            &[[w, d, h], [w, d, 0.0], [0.0, d, 0.0], [0.0, d, h]],
        ),
        surface_object(
            version,
            &format!("{zone}_Wall_Left"),
            "Wall",
            &constructions.interior_wall,
            &zone,
            false,
            &[[0.0, d, h], [0.0, d, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, h]],
        ),
    ];
    if layout.window_count > 0 {
        let construction = constructions
            .window
            .as_deref()
            .ok_or(RoomError::MissingConstruction("window"))?;
        let (z0, z1) = (layout.sill_height, layout.sill_height + layout.window_height);
        for (i, x0) in layout.x_offsets.iter().enumerate() {
            let x1 = x0 + layout.window_width;
            surfaces.push(window_object(
                version,
                &format!("{zone}_Window_{}", i + 1),
                construction,
                &facade_name,
                &[[*x0, 0.0, z1], [*x0, 0.0, z0], [x1, 0.0, z0], [x1, 0.0, z1]],
            ));
        }
    }

    let mut out = doc.clone();
    let position = out.remove_where(|o| o.is_class(BUILDING_SURFACE));
    let window_position = out.remove_where(is_fenestration);
    let at = match (position, window_position) {
        (Some(p), _) => p,
        (None, Some(p)) => p,
        (None, None) => out.len(),
    };
    out.insert(at, surfaces);

    let zone_handle = out.find_objects("Zone")[0];
    let zone_obj = out.get_mut(zone_handle).expect("zone handle");
    for idx in 7..=9 {
        if zone_obj.fields.len() > idx {
            zone_obj.set_field(idx, "autocalculate");
        }
    }
    set_geometry_rules(&mut out);
    Ok(out)
}

fn set_geometry_rules(doc: &mut IdfDocument) {
    let handles = doc.find_objects("GlobalGeometryRules");
    let wanted = ["UpperLeftCorner", "Counterclockwise", "Relative"];
    if let Some(h) = handles.first() {
        let obj = doc.get_mut(*h).expect("handle");
        for (i, v) in wanted.iter().enumerate() {
            obj.set_field(i, *v);
        }
    } else {
        let at = doc
            .objects
            .iter()
            .position(|o| o.is_class("Zone"))
            .unwrap_or(doc.len());
        doc.insert(at, [IdfObject::new("GlobalGeometryRules", wanted)]);
    }
}

/// Sets the Building object's North Axis, normalized to [0, 360).
pub fn set_orientation(doc: &IdfDocument, azimuth: f64) -> Result<IdfDocument, RoomError> {
    let mut out = doc.clone();
    let handle = *out
        .find_objects("Building")
        .first()
        .ok_or(RoomError::MissingBuildingObject)?;
    out.get_mut(handle)
        .expect("handle")
        .set_field(1, fmt_num(normalize_azimuth(azimuth)));
    Ok(out)
}

/// Replaces the zone's infiltration with a single air-changes-per-hour object.
pub fn set_infiltration(doc: &IdfDocument, ach: f64) -> Result<IdfDocument, RoomError> {
    if !ach.is_finite() || ach < 0.0 {
        return Err(RoomError::NegativeAch(ach));
    }
    let zone = zone_name(doc)?;
    let mut out = doc.clone();
    out.remove_where(|o| {
        o.is_class(INFILTRATION) && !o.name().is_some_and(|n| n.eq_ignore_ascii_case(INFILTRATION_NAME))
    });
    for object in support_objects() {
        out.upsert(&object.class_name.clone(), 0, object).expect("named support object");
    }
    let infiltration = IdfObject::new(
        INFILTRATION,
        [
            INFILTRATION_NAME.to_string(),
            zone,
            ALWAYS_ON_SCHEDULE.to_string(),
            "AirChanges/Hour".into(),
            String::new(),
            String::new(),
            String::new(),
            fmt_num(ach),
            "1".into(),
            "0".into(),
            "0".into(),
            "0".into(),
        ],
    );
    out.upsert(INFILTRATION, 0, infiltration).expect("key field present");
    Ok(out)
}

/// Air changes per hour of the zone's `AirChanges/Hour` infiltration objects.
pub fn infiltration_ach(doc: &IdfDocument) -> Option<f64> {
    let mut found = false;
    let mut total = 0.0;
    for o in doc.objects_of(INFILTRATION) {
        if o.field(3).is_some_and(|m| m.eq_ignore_ascii_case("AirChanges/Hour")) {
            found = true;
            total += o.field_f64(7).unwrap_or(0.0);
        }
    }
    found.then_some(total)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowGeometry {
    pub name: String,
    pub vertices: Vec<Vertex>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceGeometry {
    pub name: String,
    pub surface_type: String,
    pub outside_boundary_condition: String,
    /// Counter-clockwise seen from outside the zone.
    pub vertices: Vec<Vertex>,
    pub windows: Vec<WindowGeometry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoomGeometry {
    pub zone: String,
    pub north_axis: f64,
    pub surfaces: Vec<SurfaceGeometry>,
}

impl RoomGeometry {
    pub fn window_count(&self) -> usize {
        self.surfaces.iter().map(|s| s.windows.len()).sum()
    }
}

/// Surface and window polygons of the model, for display.
pub fn room_geometry(doc: &IdfDocument) -> Result<RoomGeometry, RoomError> {
    let zone = zone_name(doc)?;
    let version = ModelVersion::of(doc);
    let north_axis = doc
        .first_of("Building")
        .and_then(|b| b.field_f64(1))
        .unwrap_or(0.0);
    let mut surfaces: Vec<SurfaceGeometry> = doc
        .objects_of(BUILDING_SURFACE)
        .map(|s| SurfaceGeometry {
            name: s.name().unwrap_or_default().to_string(),
            surface_type: s.field(1).unwrap_or_default().to_string(),
            outside_boundary_condition: s
                .field(version.surface_boundary_index())
                .unwrap_or_default()
                .to_string(),
            vertices: surface_vertices(s, version),
            windows: Vec::new(),
        })
        .collect();
    for f in doc.objects_of(FENESTRATION_SURFACE) {
        let host = f.field(3).unwrap_or_default();
        if let Some(surface) = surfaces.iter_mut().find(|s| s.name.eq_ignore_ascii_case(host)) {
            surface.windows.push(WindowGeometry {
                name: f.name().unwrap_or_default().to_string(),
                vertices: read_vertices(f, version.fenestration_vertex_count_index()),
            });
        }
    }
    Ok(RoomGeometry {
        zone,
        north_axis,
        surfaces,
    })
}

/// Floor area times the vertical extent of the zone's surfaces.
pub fn zone_volume(doc: &IdfDocument) -> Option<f64> {
    let version = ModelVersion::of(doc);
    let mut floor_area = 0.0;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for s in doc.objects_of(BUILDING_SURFACE) {
        let vertices = surface_vertices(s, version);
        if vertices.is_empty() {
            continue;
        }
        lo = lo.min(min_z(&vertices));
        hi = hi.max(max_z(&vertices));
        if s.field(1).is_some_and(|t| t.eq_ignore_ascii_case("Floor")) {
            floor_area += polygon_area(&vertices);
        }
    }
    let volume = floor_area * (hi - lo);
    (volume.is_finite() && volume > 0.0).then_some(volume)
}
