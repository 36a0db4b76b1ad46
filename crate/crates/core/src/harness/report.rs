use std::fmt::Write;

use serde_json::{json, Value};

use super::Params;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
    /// Recorded but not counted either way.
    Info,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Inconclusive => "inconclusive",
            Status::Info => "info",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Item {
    pub index: usize,
    pub subject: String,
    pub status: Status,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub suite: String,
    pub params: Params,
    pub items: Vec<Item>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Counts {
    pub pass: usize,
    pub fail: usize,
    pub inconclusive: usize,
    pub info: usize,
}

impl Report {
    pub fn counts(&self) -> Counts {
        let mut c = Counts::default();
        for i in &self.items {
            match i.status {
                Status::Pass => c.pass += 1,
                Status::Fail => c.fail += 1,
                Status::Inconclusive => c.inconclusive += 1,
                Status::Info => c.info += 1,
            }
        }
        c
    }

    pub fn failures(&self) -> impl Iterator<Item = &Item> {
        self.items.iter().filter(|i| i.status == Status::Fail)
    }

    pub fn all_pass(&self) -> bool {
        let c = self.counts();
        c.fail == 0 && c.inconclusive == 0
    }

    pub fn to_text(&self) -> String {
        let p = &self.params;
        let mut s = format!(
            "suite {} seed={} count={} size={} depth={} fuel={}\n",
            self.suite, p.seed, p.count, p.size, p.depth, p.fuel
        );
        for i in &self.items {
            let _ = write!(
                s,
                "[{:>3}] {:<12} {}",
                i.index,
                i.status.as_str().to_uppercase(),
                i.subject
            );
            if !i.detail.is_empty() {
                let _ = write!(s, " :: {}", i.detail);
            }
            s.push('\n');
        }
        let c = self.counts();
        let _ = writeln!(
            s,
            "pass={} fail={} inconclusive={} info={}",
            c.pass, c.fail, c.inconclusive, c.info
        );
        s
    }

    pub fn to_json(&self) -> Value {
        let p = &self.params;
        let c = self.counts();
        json!({
            "suite": self.suite,
            "params": {"seed": p.seed, "count": p.count, "size": p.size, "depth": p.depth, "fuel": p.fuel},
            "items": self.items.iter().map(|i| json!({
                "index": i.index,
                "subject": i.subject,
                "status": i.status.as_str(),
                "detail": i.detail,
            })).collect::<Vec<_>>(),
            "summary": {"pass": c.pass, "fail": c.fail, "inconclusive": c.inconclusive, "info": c.info},
        })
    }
}
