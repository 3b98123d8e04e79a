//! Validator for the subset of JSON Schema (2020-12) used by
//! `schema/api.schema.json`. Unsupported keywords panic so the schema
//! cannot silently outgrow the checker.

use serde_json::{Map, Value};

const ANNOTATIONS: &[&str] = &["$schema", "$id", "title", "description"];

pub struct Schema {
    root: Value,
}

impl Schema {
    pub fn load() -> Self {
        let path = concat!(env!("CARGO_MANIFEST_DIR"), "/schema/api.schema.json");
        let text = std::fs::read_to_string(path).expect("schema file");
        Self {
            root: serde_json::from_str(&text).expect("schema is JSON"),
        }
    }

    /// Definition name an endpoint's success body must match.
    pub fn endpoint(&self, endpoint: &str) -> String {
        let r = self.root["x-endpoints"][endpoint]
            .as_str()
            .unwrap_or_else(|| panic!("no schema for {endpoint}"));
        r.trim_start_matches("#/$defs/").to_string()
    }

    pub fn endpoints(&self) -> Vec<String> {
        self.root["x-endpoints"].as_object().unwrap().keys().cloned().collect()
    }

    /// Validates `value` against `$defs/<def>`; returns every violation.
    pub fn validate(&self, def: &str, value: &Value) -> Vec<String> {
        let mut errors = Vec::new();
        let schema = self.def(def);
        self.check(schema, value, "$", &mut errors);
        errors
    }

    fn def(&self, name: &str) -> &Value {
        self.root["$defs"]
            .get(name)
            .unwrap_or_else(|| panic!("undefined schema {name}"))
    }

    fn check(&self, schema: &Value, value: &Value, at: &str, errors: &mut Vec<String>) {
        let schema: &Map<String, Value> = schema.as_object().expect("schema node is an object");
        for (key, rule) in schema {
            match key.as_str() {
                "$ref" => {
                    let name = rule.as_str().unwrap().trim_start_matches("#/$defs/");
                    self.check(self.def(name), value, at, errors);
                }
                "type" => {
                    let allowed: Vec<&str> = match rule {
                        Value::String(s) => vec![s.as_str()],
                        Value::Array(v) => v.iter().map(|t| t.as_str().unwrap()).collect(),
                        _ => panic!("bad type rule"),
                    };
                    if !allowed.iter().any(|t| type_matches(t, value)) {
                        errors.push(format!("{at}: expected {allowed:?}, got {value}"));
                    }
                }
                "properties" => {
                    if let Value::Object(obj) = value {
                        for (name, sub) in rule.as_object().unwrap() {
                            if let Some(v) = obj.get(name) {
                                self.check(sub, v, &format!("{at}.{name}"), errors);
                            }
                        }
                    }
                }
                "required" => {
                    if let Value::Object(obj) = value {
                        for name in rule.as_array().unwrap() {
                            let name = name.as_str().unwrap();
                            if !obj.contains_key(name) {
                                errors.push(format!("{at}: missing {name}"));
                            }
                        }
                    }
                }
                "additionalProperties" => {
                    assert_eq!(
                        rule,
                        &Value::Bool(false),
                        "only additionalProperties: false is supported"
                    );
                    if let Value::Object(obj) = value {
                        let declared = schema.get("properties").and_then(Value::as_object);
                        for name in obj.keys() {
                            if !declared.is_some_and(|d| d.contains_key(name)) {
                                errors.push(format!("{at}: unexpected property {name}"));
                            }
                        }
                    }
                }
                "items" => {
                    if let Value::Array(items) = value {
                        for (i, item) in items.iter().enumerate() {
                            self.check(rule, item, &format!("{at}[{i}]"), errors);
                        }
                    }
                }
                "minItems" => {
                    if let Value::Array(items) = value {
                        if (items.len() as u64) < rule.as_u64().unwrap() {
                            errors.push(format!("{at}: fewer than {rule} items"));
                        }
                    }
                }
                "minimum" => {
                    if let Some(x) = value.as_f64() {
                        if x < rule.as_f64().unwrap() {
                            errors.push(format!("{at}: {x} below minimum {rule}"));
                        }
                    }
                }
                "enum" => {
                    if !rule.as_array().unwrap().contains(value) {
                        errors.push(format!("{at}: {value} not in {rule}"));
                    }
                }
                "const" => {
                    if rule != value {
                        errors.push(format!("{at}: expected {rule}, got {value}"));
                    }
                }
                "oneOf" => {
                    let matching = rule
                        .as_array()
                        .unwrap()
                        .iter()
                        .filter(|alt| {
                            let mut sub = Vec::new();
                            self.check(alt, value, at, &mut sub);
                            sub.is_empty()
                        })
                        .count();
                    if matching != 1 {
                        errors.push(format!("{at}: matches {matching} oneOf alternatives"));
                    }
                }
                k if ANNOTATIONS.contains(&k) || k.starts_with("x-") => {}
                other => panic!("unsupported schema keyword {other}"),
            }
        }
    }
}

fn type_matches(t: &str, v: &Value) -> bool {
    match t {
        "object" => v.is_object(),
        "array" => v.is_array(),
        "string" => v.is_string(),
        "boolean" => v.is_boolean(),
        "null" => v.is_null(),
        "number" => v.is_number(),
        "integer" => v.is_i64() || v.is_u64(),
        other => panic!("unsupported type {other}"),
    }
}
