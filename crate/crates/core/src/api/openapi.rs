//! Machine-readable description of the HTTP interface.

use serde_json::{json, Value};

use super::ErrorCode;

fn error_response(description: &str) -> Value {
    json!({
        "description": description,
        "content": { "application/json": { "schema": { "$ref": "#/components/schemas/ApiError" } } }
    })
}

fn json_response(description: &str, schema: &str) -> Value {
    json!({
        "description": description,
        "content": { "application/json": { "schema": { "$ref": format!("#/components/schemas/{schema}") } } }
    })
}

fn id_param() -> Value {
    json!({ "name": "id", "in": "path", "required": true, "schema": { "type": "string" } })
}

fn number_list() -> Value {
    json!({ "type": "array", "items": { "type": "number" } })
}

pub fn openapi_document() -> Value {
    let codes: Vec<&str> = ErrorCode::ALL.iter().map(|c| c.as_str()).collect();
    json!({
        "openapi": "3.0.3",
        "info": {
            "title": "roomsim",
            "version": env!("CARGO_PKG_VERSION"),
            "description": "Single-room simulation service: upload a room model, weather and occupancy, configure, run, fetch results."
        },
        "paths": {
            "/simulations": {
                "post": {
                    "summary": "Create a simulation record",
                    "responses": {
                        "201": json_response("Created record", "SimulationRecord"),
                        "503": error_response("Store unavailable")
                    }
                },
                "get": {
                    "summary": "Simulation history in creation order",
                    "responses": {
                        "200": {
                            "description": "Record summaries",
                            "content": { "application/json": { "schema": {
                                "type": "array", "items": { "$ref": "#/components/schemas/RecordSummary" }
                            } } }
                        }
                    }
                }
            },
            "/simulations/{id}": {
                "get": {
                    "summary": "Full record",
                    "parameters": [id_param()],
                    "responses": {
                        "200": json_response("Record", "SimulationRecord"),
                        "404": error_response("Unknown id")
                    }
                }
            },
            "/simulations/{id}/input/{kind}": {
                "put": {
                    "summary": "Upload an input file as the raw request body",
                    "parameters": [
                        id_param(),
                        { "name": "kind", "in": "path", "required": true,
                          "schema": { "type": "string", "enum": ["idf", "weather", "occupancy"] } }
                    ],
                    "requestBody": { "required": true, "content": { "application/octet-stream": { "schema": { "type": "string", "format": "binary" } } } },
                    "responses": {
                        "204": { "description": "Stored" },
                        "404": error_response("Unknown id or input kind"),
                        "409": error_response("Record is running or finished"),
                        "422": error_response("File does not parse")
                    }
                }
            },
            "/simulations/{id}/parameters": {
                "post": {
                    "summary": "Validate parameters and build the model",
                    "parameters": [id_param()],
                    "requestBody": { "required": true, "content": { "application/json": { "schema": { "$ref": "#/components/schemas/Parameters" } } } },
                    "responses": {
                        "200": json_response("Configured record", "SimulationRecord"),
                        "404": error_response("Unknown id"),
                        "409": error_response("Record is running"),
                        "422": error_response("Validation failed")
                    }
                }
            },
            "/simulations/{id}/run": {
                "post": {
                    "summary": "Start a configured simulation in the background",
                    "parameters": [id_param()],
                    "responses": {
                        "202": json_response("Running record", "SimulationRecord"),
                        "404": error_response("Unknown id"),
                        "409": error_response("Already running"),
                        "422": error_response("Not configured")
                    }
                }
            },
            "/simulations/{id}/cancel": {
                "post": {
                    "summary": "Request cancellation of a running simulation",
                    "parameters": [id_param()],
                    "responses": { "200": { "description": "`{\"cancelled\": bool}`" }, "404": error_response("Unknown id") }
                }
            },
            "/simulations/{id}/status": {
                "get": {
                    "summary": "Status and progress",
                    "parameters": [id_param()],
                    "responses": { "200": json_response("Status", "StatusView"), "404": error_response("Unknown id") }
                }
            },
            "/simulations/{id}/results/{kind}": {
                "get": {
                    "summary": "Download the result table (csv) or raw output (eso)",
                    "parameters": [
                        id_param(),
                        { "name": "kind", "in": "path", "required": true, "schema": { "type": "string", "enum": ["csv", "eso"] } }
                    ],
                    "responses": {
                        "200": { "description": "File contents", "content": { "text/csv": {}, "text/plain": {} } },
                        "404": error_response("Unknown id"),
                        "409": error_response("No results yet")
                    }
                }
            },
            "/simulations/{id}/geometry": {
                "get": {
                    "summary": "Surfaces and windows of the prepared model, vertices in metres",
                    "parameters": [id_param()],
                    "responses": {
                        "200": json_response("Geometry", "RoomGeometry"),
                        "404": error_response("Unknown id"),
                        "422": error_response("Not configured")
                    }
                }
            },
            "/simulations/{id}/rerun": {
                "post": {
                    "summary": "Clone a finished record with parameter overrides",
                    "parameters": [id_param()],
                    "requestBody": { "required": false, "content": { "application/json": { "schema": { "$ref": "#/components/schemas/Overrides" } } } },
                    "responses": {
                        "201": json_response("New configured record", "SimulationRecord"),
                        "404": error_response("Unknown id"),
                        "409": error_response("Source not finished"),
                        "422": error_response("Validation failed")
                    }
                }
            },
            "/series": {
                "post": {
                    "summary": "Run one child simulation per parameter combination",
                    "requestBody": { "required": true, "content": { "application/json": { "schema": { "$ref": "#/components/schemas/SeriesSpec" } } } },
                    "responses": {
                        "202": json_response("Series with child ids", "SeriesView"),
                        "404": error_response("Unknown base id"),
                        "422": error_response("Empty axis or base not configured")
                    }
                },
                "get": {
                    "summary": "Series ids in creation order",
                    "responses": { "200": { "description": "Ids", "content": { "application/json": { "schema": { "type": "array", "items": { "type": "string" } } } } } }
                }
            },
            "/series/{id}": {
                "get": {
                    "summary": "Per-child status of a series",
                    "parameters": [id_param()],
                    "responses": { "200": json_response("Series", "SeriesView"), "404": error_response("Unknown id") }
                }
            },
            "/openapi": {
                "get": { "summary": "This document", "responses": { "200": { "description": "OpenAPI document" } } }
            }
        },
        "components": {
            "schemas": {
                "ApiError": {
                    "type": "object",
                    "required": ["code", "message"],
                    "properties": {
                        "code": { "type": "string", "enum": codes },
                        "message": { "type": "string" }
                    }
                },
                "Status": { "type": "string", "enum": ["created", "configured", "running", "done", "failed"] },
                "ArtifactRef": {
                    "type": "object",
                    "properties": { "record": { "type": "string" }, "name": { "type": "string" } }
                },
                "SimulationRecord": {
                    "type": "object",
                    "properties": {
                        "id": { "type": "string" },
                        "created_at": { "type": "string", "format": "date-time" },
                        "status": { "$ref": "#/components/schemas/Status" },
                        "inputs": {
                            "type": "object",
                            "properties": {
                                "idf": { "$ref": "#/components/schemas/ArtifactRef" },
                                "weather": { "$ref": "#/components/schemas/ArtifactRef" },
                                "occupancy": { "$ref": "#/components/schemas/ArtifactRef" }
                            }
                        },
                        "parameters": { "$ref": "#/components/schemas/Parameters" },
                        "results": {
                            "type": "object",
                            "properties": {
                                "eso": { "$ref": "#/components/schemas/ArtifactRef" },
                                "csv": { "$ref": "#/components/schemas/ArtifactRef" }
                            }
                        },
                        "error": { "type": "string" },
                        "parent_id": { "type": "string" }
                    }
                },
                "RecordSummary": {
                    "type": "object",
                    "properties": {
                        "id": { "type": "string" },
                        "created_at": { "type": "string", "format": "date-time" },
                        "status": { "$ref": "#/components/schemas/Status" },
                        "engine": { "type": "string", "enum": ["energyplus", "surrogate"] },
                        "parent_id": { "type": "string" }
                    }
                },
                "StatusView": {
                    "type": "object",
                    "properties": {
                        "status": { "$ref": "#/components/schemas/Status" },
                        "progress": { "type": "number", "minimum": 0, "maximum": 1 },
                        "error": { "type": "string" }
                    }
                },
                "RoomSpec": {
                    "type": "object",
                    "additionalProperties": false,
                    "required": ["width", "depth", "height"],
                    "properties": {
                        "width": { "type": "number", "description": "Exterior wall length, m" },
                        "depth": { "type": "number", "description": "m" },
                        "height": { "type": "number", "description": "m" },
                        "orientation": { "type": "number", "description": "Degrees clockwise from north" },
                        "infiltration_ach": { "type": "number", "description": "Air changes per hour" }
                    }
                },
                "SurrogateParams": {
                    "type": "object",
                    "additionalProperties": false,
                    "properties": {
                        "co2_gen_per_person": { "type": "number" },
                        "outdoor_co2": { "type": "number" },
                        "heat_gain_per_person": { "type": "number" },
                        "air_heat_capacity": { "type": "number" },
                        "envelope_time_constant": { "type": "number" },
                        "window_open_ach": { "type": "number" },
                        "moisture_gen_per_person": { "type": "number" }
                    }
                },
                "Parameters": {
                    "type": "object",
                    "additionalProperties": false,
                    "required": ["room", "run_period"],
                    "properties": {
                        "room": { "$ref": "#/components/schemas/RoomSpec" },
                        "run_period": {
                            "type": "object",
                            "additionalProperties": false,
                            "required": ["begin", "end"],
                            "properties": {
                                "begin": { "type": "string", "format": "date" },
                                "end": { "type": "string", "format": "date" }
                            }
                        },
                        "step": { "type": "integer", "description": "Minutes; defaults to the occupancy step" },
                        "engine": { "type": "string", "enum": ["energyplus", "surrogate"] },
                        "surrogate": { "$ref": "#/components/schemas/SurrogateParams" },
                        "window_margin": { "type": "number" },
                        "window_gap": { "type": "number" }
                    }
                },
                "Overrides": {
                    "type": "object",
                    "additionalProperties": false,
                    "properties": {
                        "width": { "type": "number" },
                        "depth": { "type": "number" },
                        "height": { "type": "number" },
                        "orientation": { "type": "number" },
                        "infiltration_ach": { "type": "number" },
                        "begin": { "type": "string", "format": "date" },
                        "end": { "type": "string", "format": "date" },
                        "step": { "type": "integer" },
                        "engine": { "type": "string", "enum": ["energyplus", "surrogate"] },
                        "surrogate": { "$ref": "#/components/schemas/SurrogateParams" },
                        "window_margin": { "type": "number" },
                        "window_gap": { "type": "number" }
                    }
                },
                "SeriesSpec": {
                    "type": "object",
                    "additionalProperties": false,
                    "required": ["base_id"],
                    "properties": {
                        "base_id": { "type": "string" },
                        "widths": number_list(),
                        "depths": number_list(),
                        "orientations": number_list(),
                        "infiltrations": number_list()
                    }
                },
                "SeriesView": {
                    "type": "object",
                    "properties": {
                        "id": { "type": "string" },
                        "created_at": { "type": "string", "format": "date-time" },
                        "base_id": { "type": "string" },
                        "status": { "type": "string", "enum": ["running", "done"] },
                        "children": {
                            "type": "array",
                            "items": {
                                "type": "object",
                                "properties": {
                                    "id": { "type": "string" },
                                    "combination": {
                                        "type": "object",
                                        "properties": {
                                            "width": { "type": "number" },
                                            "depth": { "type": "number" },
                                            "orientation": { "type": "number" },
                                            "infiltration_ach": { "type": "number" }
                                        }
                                    },
                                    "status": { "$ref": "#/components/schemas/Status" },
                                    "error": { "type": "string" }
                                }
                            }
                        }
                    }
                },
                "RoomGeometry": {
                    "type": "object",
                    "properties": {
                        "zone": { "type": "string" },
                        "north_axis": { "type": "number" },
                        "surfaces": {
                            "type": "array",
                            "items": {
                                "type": "object",
                                "properties": {
                                    "name": { "type": "string" },
                                    "surface_type": { "type": "string" },
                                    "outside_boundary_condition": { "type": "string" },
                                    "vertices": { "type": "array", "items": number_list() },
                                    "windows": {
                                        "type": "array",
                                        "items": {
                                            "type": "object",
                                            "properties": {
                                                "name": { "type": "string" },
                                                "vertices": { "type": "array", "items": number_list() }
                                            }
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    })
}
