//! Lossless object model for EnergyPlus IDF text.
//!
//! An IDF file is a flat sequence of objects of the form
//! `ClassName, field1, field2, ..., fieldN;` where `!` starts a comment that
//! runs to the end of the line. The parser keeps object order and comments;
//! the serializer writes one field per line with a four-space indent.

use std::fmt::Write as _;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IdfError {
    #[error("line {line}: object `{class_name}` is not terminated by `;`")]
    UnterminatedObject { class_name: String, line: usize },
    #[error("line {line}: object has an empty class name")]
    EmptyClassName { line: usize },
    #[error("line {line}: object `{class_name}` has no fields")]
    MissingFields { class_name: String, line: usize },
    #[error("line {line}: macro directive `{directive}` is not supported")]
    MacroDirective { directive: String, line: usize },
    #[error("key field index {index} is out of range for `{class_name}` ({len} fields)")]
    KeyFieldOutOfRange {
        class_name: String,
        index: usize,
        len: usize,
    },
    #[error("object class `{found}` does not match requested class `{expected}`")]
    ClassMismatch { expected: String, found: String },
}

/// Position of an object inside an [`IdfDocument`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ObjectHandle(pub usize);

#[derive(Debug, Clone, Default)]
pub struct IdfObject {
    pub class_name: String,
    pub fields: Vec<String>,
    /// Comment attached to the class-name line.
    pub class_comment: Option<String>,
    /// One slot per field; multi-line comments are joined with `\n`.
    pub trailing_comments: Vec<Option<String>>,
}

impl IdfObject {
    pub fn new<S: Into<String>>(class_name: impl Into<String>, fields: impl IntoIterator<Item = S>) -> Self {
        let fields: Vec<String> = fields.into_iter().map(Into::into).collect();
        let trailing_comments = vec![None; fields.len()];
        IdfObject {
            class_name: class_name.into(),
            fields,
            class_comment: None,
            trailing_comments,
        }
    }

    pub fn is_class(&self, class_name: &str) -> bool {
        self.class_name.eq_ignore_ascii_case(class_name)
    }

    /// Object name, i.e. the first field, if any.
    pub fn name(&self) -> Option<&str> {
        self.fields.first().map(String::as_str)
    }

    pub fn field(&self, index: usize) -> Option<&str> {
        self.fields.get(index).map(String::as_str)
    }

    pub fn field_f64(&self, index: usize) -> Option<f64> {
        self.field(index).and_then(|v| v.trim().parse().ok())
    }

    /// Sets a field, growing the field list with empty values when needed.
    pub fn set_field(&mut self, index: usize, value: impl Into<String>) {
        if index >= self.fields.len() {
            self.fields.resize(index + 1, String::new());
            self.trailing_comments.resize(index + 1, None);
        }
        self.fields[index] = value.into();
    }

    fn attach_comment(&mut self, comment: String) {
        let slot = match self.trailing_comments.last_mut() {
            Some(slot) => slot,
            None => &mut self.class_comment,
        };
        match slot {
            Some(existing) => {
                existing.push('\n');
                existing.push_str(&comment);
            }
            None => *slot = Some(comment),
        }
    }
}

/// Structural equality: class names compare case-insensitively, fields
/// exactly, comments are ignored.
impl PartialEq for IdfObject {
    fn eq(&self, other: &Self) -> bool {
        self.class_name.eq_ignore_ascii_case(&other.class_name) && self.fields == other.fields
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct IdfDocument {
    pub objects: Vec<IdfObject>,
    pub leading_comments: Vec<String>,
}

impl IdfDocument {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn parse(text: &str) -> Result<Self, IdfError> {
        parse_idf(text)
    }

    pub fn serialize(&self) -> String {
        serialize_idf(self)
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    pub fn get(&self, handle: ObjectHandle) -> Option<&IdfObject> {
        self.objects.get(handle.0)
    }

    pub fn get_mut(&mut self, handle: ObjectHandle) -> Option<&mut IdfObject> {
        self.objects.get_mut(handle.0)
    }

    /// Handles of all objects of `class_name` (case-insensitive), in document order.
    pub fn find_objects(&self, class_name: &str) -> Vec<ObjectHandle> {
        self.objects
            .iter()
            .enumerate()
            .filter(|(_, o)| o.is_class(class_name))
            .map(|(i, _)| ObjectHandle(i))
            .collect()
    }

    pub fn objects_of<'a>(&'a self, class_name: &'a str) -> impl Iterator<Item = &'a IdfObject> + 'a {
        self.objects.iter().filter(move |o| o.is_class(class_name))
    }

    pub fn first_of(&self, class_name: &str) -> Option<&IdfObject> {
        self.objects.iter().find(|o| o.is_class(class_name))
    }

    /// Finds an object of `class_name` whose name field matches, case-insensitively.
    pub fn find_named(&self, class_name: &str, name: &str) -> Option<ObjectHandle> {
        self.objects
            .iter()
            .position(|o| o.is_class(class_name) && o.name().is_some_and(|n| n.eq_ignore_ascii_case(name)))
            .map(ObjectHandle)
    }

    /// Returns a new document with `object` upserted; see [`IdfDocument::upsert`].
    pub fn upsert_object(
        &self,
        class_name: &str,
        key_field_index: usize,
        object: IdfObject,
    ) -> Result<IdfDocument, IdfError> {
        let mut doc = self.clone();
        doc.upsert(class_name, key_field_index, object)?;
        Ok(doc)
    }

    /// Replaces the first object of the class whose key field matches
    /// (case-insensitive) in place, or appends the object at the end.
    pub fn upsert(
        &mut self,
        class_name: &str,
        key_field_index: usize,
        object: IdfObject,
    ) -> Result<ObjectHandle, IdfError> {
        if !object.is_class(class_name) {
            return Err(IdfError::ClassMismatch {
                expected: class_name.to_string(),
                found: object.class_name,
            });
        }
        let key = object
            .field(key_field_index)
            .ok_or_else(|| IdfError::KeyFieldOutOfRange {
                class_name: class_name.to_string(),
                index: key_field_index,
                len: object.fields.len(),
            })?
            .to_string();
        let existing = self.objects.iter().position(|o| {
            o.is_class(class_name)
                && o.field(key_field_index).is_some_and(|v| v.eq_ignore_ascii_case(&key))
        });
        match existing {
            Some(i) => {
                self.objects[i] = object;
                Ok(ObjectHandle(i))
            }
            None => {
                self.objects.push(object);
                Ok(ObjectHandle(self.objects.len() - 1))
            }
        }
    }

    pub fn push(&mut self, object: IdfObject) -> ObjectHandle {
        self.objects.push(object);
        ObjectHandle(self.objects.len() - 1)
    }

    /// Removes every object matching the predicate. Returns the index the
    /// first removed object occupied, if any.
    pub fn remove_where(&mut self, mut pred: impl FnMut(&IdfObject) -> bool) -> Option<usize> {
        let first = self.objects.iter().position(&mut pred);
        self.objects.retain(|o| !pred(o));
        first
    }

    pub fn insert(&mut self, index: usize, objects: impl IntoIterator<Item = IdfObject>) {
        let index = index.min(self.objects.len());
        let tail = self.objects.split_off(index);
        self.objects.extend(objects);
        self.objects.extend(tail);
    }
}

/// Parses IDF text into a document.
pub fn parse_idf(text: &str) -> Result<IdfDocument, IdfError> {
    Parser::default().run(text)
}

#[derive(Default)]
struct Parser {
    doc: IdfDocument,
    current: Option<(IdfObject, usize)>,
    token: String,
    // comment seen while a token is still open; attached once it closes
    pending_comments: Vec<String>,
}

impl Parser {
    fn run(mut self, text: &str) -> Result<IdfDocument, IdfError> {
        for (line_idx, raw_line) in text.lines().enumerate() {
            let line_no = line_idx + 1;
            let line = raw_line.trim_end_matches('\r');
            if self.current.is_none() && self.token.trim().is_empty() && line.trim_start().starts_with("##") {
                let directive = line.trim().split_whitespace().next().unwrap_or("##").to_string();
                return Err(IdfError::MacroDirective { directive, line: line_no });
            }
            let (content, comment) = match line.find('!') {
                Some(pos) => (&line[..pos], Some(line[pos + 1..].trim_end().to_string())),
                None => (line, None),
            };
            for ch in content.chars() {
                match ch {
                    ',' => self.close_token(false, line_no)?,
                    ';' => self.close_token(true, line_no)?,
                    _ => self.token.push(ch),
                }
            }
            if !self.token.trim().is_empty() {
                self.token.push(' ');
            }
            if let Some(comment) = comment {
                self.add_comment(comment);
            }
        }
        if let Some((object, line)) = self.current.take() {
            return Err(IdfError::UnterminatedObject {
                class_name: object.class_name,
                line,
            });
        }
        if !self.token.trim().is_empty() {
            return Err(IdfError::UnterminatedObject {
                class_name: self.token.trim().to_string(),
                line: text.lines().count(),
            });
        }
        Ok(self.doc)
    }

    fn add_comment(&mut self, comment: String) {
        if !self.token.trim().is_empty() {
            self.pending_comments.push(comment);
            return;
        }
        if let Some((object, _)) = self.current.as_mut() {
            object.attach_comment(comment);
        } else if let Some(last) = self.doc.objects.last_mut() {
            last.attach_comment(comment);
        } else {
            self.doc.leading_comments.push(comment);
        }
    }

    fn close_token(&mut self, terminal: bool, line: usize) -> Result<(), IdfError> {
        let value = self.token.trim().to_string();
        self.token.clear();
        match self.current.as_mut() {
            None => {
                if value.is_empty() {
                    return Err(IdfError::EmptyClassName { line });
                }
                if terminal {
                    return Err(IdfError::MissingFields { class_name: value, line });
                }
                self.current = Some((IdfObject::new(value, Vec::<String>::new()), line));
            }
            Some((object, _)) => {
                object.fields.push(value);
                object.trailing_comments.push(None);
            }
        }
        let pending = std::mem::take(&mut self.pending_comments);
        if let Some((object, _)) = self.current.as_mut() {
            for comment in pending {
                object.attach_comment(comment);
            }
        }
        if terminal {
            let (object, _) = self.current.take().expect("object in progress");
            self.doc.objects.push(object);
        }
        Ok(())
    }
}

const COMMENT_COLUMN: usize = 29;

fn push_with_comment(out: &mut String, line: &str, comment: Option<&String>) {
    out.push_str(line);
    if let Some(comment) = comment {
        let mut lines = comment.split('\n');
        let first = lines.next().unwrap_or("");
        let pad = COMMENT_COLUMN.saturating_sub(line.len()).max(2);
        out.extend(std::iter::repeat_n(' ', pad));
        let _ = write!(out, "!{first}");
        for extra in lines {
            let _ = write!(out, "\n!{extra}");
        }
    }
    out.push('\n');
}

/// Serializes a document: one field per line, four-space indent, a blank
/// line between objects. Output is a fixed point of `parse_idf`.
pub fn serialize_idf(doc: &IdfDocument) -> String {
    let mut out = String::new();
    for comment in &doc.leading_comments {
        let _ = writeln!(out, "!{comment}");
    }
    if !doc.leading_comments.is_empty() && !doc.objects.is_empty() {
        out.push('\n');
    }
    for (i, object) in doc.objects.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let header = format!("{},", object.class_name);
        push_with_comment(&mut out, &header, object.class_comment.as_ref());
        let last = object.fields.len().saturating_sub(1);
        for (j, value) in object.fields.iter().enumerate() {
            let sep = if j == last { ';' } else { ',' };
            let line = format!("    {value}{sep}");
            let comment = object.trailing_comments.get(j).and_then(Option::as_ref);
            push_with_comment(&mut out, &line, comment);
        }
    }
    out
}
