//! Table rendering: CSV with a `#`-prefixed metadata header, and a JSON
//! mirror of the same command/meta/columns/rows structure.  Every float
//! goes through one 15-significant-digit formatter (the JSON numbers are
//! round-tripped through it), so a given configuration always produces
//! byte-identical artifacts in either format.

/// One table cell.
#[derive(Clone, Debug)]
pub enum Value {
    Float(f64),
    Int(i64),
    Text(String),
    Empty,
}

/// 15 significant digits, scientific notation.
pub fn sig15(x: f64) -> String {
    format!("{x:.14e}")
}

fn csv_escape(text: &str) -> String {
    if text.contains([',', '"', '\n']) {
        format!("\"{}\"", text.replace('"', "\"\""))
    } else {
        text.to_string()
    }
}

impl Value {
    fn csv_cell(&self) -> String {
        match self {
            Value::Float(x) => sig15(*x),
            Value::Int(i) => i.to_string(),
            Value::Text(s) => csv_escape(s),
            Value::Empty => String::new(),
        }
    }

    fn json_cell(&self) -> serde_json::Value {
        match self {
            Value::Float(x) => sig15(*x)
                .parse::<f64>()
                .ok()
                .and_then(serde_json::Number::from_f64)
                .map(serde_json::Value::Number)
                .unwrap_or(serde_json::Value::Null),
            Value::Int(i) => serde_json::Value::from(*i),
            Value::Text(s) => serde_json::Value::from(s.as_str()),
            Value::Empty => serde_json::Value::Null,
        }
    }
}

/// One tabular artifact: command name, ordered configuration echo, column
/// labels, and data rows.
#[derive(Clone, Debug)]
pub struct Document {
    pub command: &'static str,
    pub meta: Vec<(&'static str, String)>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
}

impl Document {
    pub fn new(command: &'static str, columns: Vec<&'static str>) -> Self {
        Document {
            command,
            meta: Vec::new(),
            columns,
            rows: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: &'static str, value: impl Into<String>) {
        self.meta.push((key, value.into()));
    }

    pub fn meta_float(&mut self, key: &'static str, value: f64) {
        self.meta.push((key, sig15(value)));
    }

    pub fn row(&mut self, cells: Vec<Value>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
    }

    pub fn render_csv(&self) -> String {
        let mut out = String::new();
        out.push_str("# command: ");
        out.push_str(self.command);
        out.push('\n');
        for (k, v) in &self.meta {
            out.push_str(&format!("# {k}: {v}\n"));
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Value::csv_cell).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn render_json(&self) -> String {
        let meta: Vec<serde_json::Value> = self
            .meta
            .iter()
            .map(|(k, v)| serde_json::json!([k, v]))
            .collect();
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|row| serde_json::Value::Array(row.iter().map(Value::json_cell).collect()))
            .collect();
        let doc = serde_json::json!({
            "command": self.command,
            "meta": meta,
            "columns": self.columns,
            "rows": rows,
        });
        let mut text = serde_json::to_string_pretty(&doc).expect("plain tree serializes");
        text.push('\n');
        text
    }
}
