use serde::Serialize;
use serde_json::Value;

use crate::config::JobConfig;

pub const SCHEMA: &str = "iwasawa-report/1";

#[derive(Clone, Debug, Serialize)]
pub struct Assertion {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

/// The JSON document written by every subcommand. Field order is fixed and
/// maps are sorted, so equal inputs give byte-identical output.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub config: JobConfig,
    pub results: Value,
    pub certificates: Value,
    pub assertions: Vec<Assertion>,
}

impl Report {
    pub fn new(config: JobConfig) -> Self {
        Report {
            schema: SCHEMA,
            config,
            results: Value::Object(Default::default()),
            certificates: Value::Object(Default::default()),
            assertions: Vec::new(),
        }
    }

    pub fn result(&mut self, key: &str, v: impl Serialize) {
        insert(&mut self.results, key, v);
    }

    pub fn certificate(&mut self, key: &str, v: impl Serialize) {
        insert(&mut self.certificates, key, v);
    }

    pub fn assert(&mut self, name: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.assertions.push(Assertion {
            name: name.into(),
            pass,
            detail: detail.into(),
        });
    }

    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One line per assertion, for stderr.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        for a in &self.assertions {
            let v = if a.pass { "ok  " } else { "FAIL" };
            s.push_str(&format!("{v} {}: {}\n", a.name, a.detail));
        }
        let n = self.assertions.len();
        let ok = self.assertions.iter().filter(|a| a.pass).count();
        s.push_str(&format!(
            "{}: {ok}/{n} assertions pass\n",
            self.config.command
        ));
        s
    }
}

fn insert(obj: &mut Value, key: &str, v: impl Serialize) {
    let v = serde_json::to_value(v).expect("value serializes");
    obj.as_object_mut()
        .expect("object")
        .insert(key.to_string(), v);
}

#[cfg(test)]
mod tests {
    use super::*;
    use iwasawa_core::lfun::Convention;
    use iwasawa_core::series::GeneratorMode;

    fn config() -> JobConfig {
        JobConfig {
            command: "search".into(),
            p: Some(5),
            n: None,
            theta: None,
            prec: (4, 4),
            generator: GeneratorMode::Simple,
            convention: Convention::Main,
            threads: None,
        }
    }

    #[test]
    fn deterministic_output() {
        let build = || {
            let mut r = Report::new(config());
            r.result("zeta", 1);
            r.result("alpha", vec![1, 2]);
            r.assert("a", true, "");
            r
        };
        assert_eq!(build().to_json(), build().to_json());
        let j = build().to_json();
        assert!(j.find("\"alpha\"").unwrap() < j.find("\"zeta\"").unwrap());
        assert!(build().passed());
    }
}
