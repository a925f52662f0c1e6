//! Verdict tables rendered as aligned text or CSV.

use std::fmt::Write as _;

use sympoisson::sampling::Sampling;

/// One check: what was computed, what was expected, and how close.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub subject: String,
    pub check: String,
    pub verdict: String,
    pub expected: Option<String>,
    pub max_residual: Option<f64>,
    pub samples: usize,
}

impl Row {
    pub fn new(subject: &str, check: &str, verdict: impl Into<String>) -> Row {
        Row {
            subject: subject.to_string(),
            check: check.to_string(),
            verdict: verdict.into(),
            expected: None,
            max_residual: None,
            samples: 0,
        }
    }

    pub fn expect(mut self, expected: Option<String>) -> Row {
        self.expected = expected;
        self
    }

    pub fn residual(mut self, r: f64, samples: usize) -> Row {
        self.max_residual = Some(r);
        self.samples = samples;
        self
    }

    /// A row without an expectation always passes.
    pub fn passes(&self) -> bool {
        self.expected.as_ref().is_none_or(|e| *e == self.verdict)
    }

    fn status(&self) -> &'static str {
        match (&self.expected, self.passes()) {
            (None, _) => "-",
            (Some(_), true) => "ok",
            (Some(_), false) => "MISMATCH",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Csv,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub sampling: Sampling,
    pub rows: Vec<Row>,
}

fn residual_cell(r: Option<f64>) -> String {
    r.map(|v| format!("{v:.3e}")).unwrap_or_default()
}

impl Report {
    pub fn new(sampling: Sampling) -> Report {
        Report {
            sampling,
            rows: Vec::new(),
        }
    }

    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(Row::passes)
    }

    pub fn mismatches(&self) -> usize {
        self.rows.iter().filter(|r| !r.passes()).count()
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.text(),
            Format::Csv => self.csv(),
        }
    }

    fn cells(&self) -> Vec<[String; 7]> {
        self.rows
            .iter()
            .map(|r| {
                [
                    r.subject.clone(),
                    r.check.clone(),
                    r.verdict.clone(),
                    r.expected.clone().unwrap_or_else(|| "-".into()),
                    r.status().to_string(),
                    residual_cell(r.max_residual),
                    if r.samples == 0 {
                        String::new()
                    } else {
                        r.samples.to_string()
                    },
                ]
            })
            .collect()
    }

    fn text(&self) -> String {
        let header = [
            "subject",
            "check",
            "verdict",
            "expected",
            "status",
            "max_residual",
            "samples",
        ];
        let cells = self.cells();
        let mut widths = header.map(str::len);
        for row in &cells {
            for (w, c) in widths.iter_mut().zip(row) {
                *w = (*w).max(c.chars().count());
            }
        }
        let s = &self.sampling;
        let mut out = format!("# seed={:#x} samples={} tol={:e}\n", s.seed, s.count, s.tol);
        let line = |out: &mut String, row: &[&str]| {
            let padded: Vec<String> = row
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:<w$}", w = *w))
                .collect();
            let _ = writeln!(out, "{}", padded.join("  ").trim_end());
        };
        line(&mut out, &header);
        for row in &cells {
            let refs: Vec<&str> = row.iter().map(String::as_str).collect();
            line(&mut out, &refs);
        }
        let _ = writeln!(
            out,
            "# {} checks, {} mismatches",
            self.rows.len(),
            self.mismatches()
        );
        out
    }

    fn csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let s = &self.sampling;
        w.write_record([
            "subject",
            "check",
            "verdict",
            "expected",
            "status",
            "max_residual",
            "samples",
            "seed",
            "tol",
        ])
        .expect("in-memory write");
        let seed = s.seed.to_string();
        let tol = format!("{:e}", s.tol);
        for row in self.cells() {
            let mut rec: Vec<&str> = row.iter().map(String::as_str).collect();
            rec.push(&seed);
            rec.push(&tol);
            w.write_record(&rec).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 cells")
    }
}
