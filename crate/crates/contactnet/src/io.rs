//! On-disk formats: datasets, partitions, curves, trajectories and fitted models.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use contactnet_core::community::Partition;
use contactnet_core::graph::{
    attendance_to_graph, contacts_to_graph, parse_edge_list, AttendanceRecord, ContactEvent, LabeledGraph,
    NodeLabels,
};
use contactnet_core::metrics::MeanCurves;
use contactnet_core::models::EdgeProbabilityModel;
use contactnet_core::sir::Trajectory;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Context, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DatasetFormat {
    /// One edge per line, `#` comments, optional `%N <count>` header.
    #[default]
    EdgeList,
    /// CSV `time,node_a,node_b`.
    Contacts,
    /// CSV `event_id,person`; each event becomes a clique.
    Attendance,
}

impl FromStr for DatasetFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "edge_list" | "edges" => Ok(DatasetFormat::EdgeList),
            "contacts" => Ok(DatasetFormat::Contacts),
            "attendance" => Ok(DatasetFormat::Attendance),
            other => Err(format!("unknown dataset format `{other}` (edge_list, contacts, attendance)")),
        }
    }
}

impl DatasetFormat {
    pub fn as_str(self) -> &'static str {
        match self {
            DatasetFormat::EdgeList => "edge_list",
            DatasetFormat::Contacts => "contacts",
            DatasetFormat::Attendance => "attendance",
        }
    }

    /// Guess from a CSV header line, falling back to an edge list.
    pub fn sniff(path: &Path) -> Result<Self> {
        let text = read_text(path)?;
        let header = text.lines().find(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
        let cols: Vec<String> = header
            .map(|h| h.split(',').map(|c| c.trim().to_ascii_lowercase()).collect())
            .unwrap_or_default();
        Ok(if cols.iter().any(|c| c == "event_id") {
            DatasetFormat::Attendance
        } else if cols.iter().any(|c| c == "node_a") {
            DatasetFormat::Contacts
        } else {
            DatasetFormat::EdgeList
        })
    }
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
    }
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

#[derive(Debug, Deserialize)]
struct ContactRow {
    time: String,
    node_a: String,
    node_b: String,
}

#[derive(Debug, Deserialize)]
struct AttendanceRow {
    event_id: String,
    person: String,
}

fn csv_reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes())
}

fn csv_err(path: &Path, e: &csv::Error) -> CliError {
    let line = e.position().map(|p| p.line()).unwrap_or(0);
    CliError::Data(format!("{}: line {line}: {e}", path.display()))
}

pub fn parse_contacts(path: &Path, text: &str) -> Result<Vec<ContactEvent>> {
    let mut rdr = csv_reader(text);
    let mut out = Vec::new();
    for row in rdr.deserialize::<ContactRow>() {
        let row = row.map_err(|e| csv_err(path, &e))?;
        let line = out.len() + 2;
        let ev = ContactEvent::new(row.time, row.node_a, row.node_b)
            .context(|| format!("{}: record {line}", path.display()))?;
        out.push(ev);
    }
    Ok(out)
}

pub fn parse_attendance(path: &Path, text: &str) -> Result<Vec<AttendanceRecord>> {
    let mut rdr = csv_reader(text);
    let mut out = Vec::new();
    for row in rdr.deserialize::<AttendanceRow>() {
        let row = row.map_err(|e| csv_err(path, &e))?;
        if row.event_id.is_empty() || row.person.is_empty() {
            return Err(CliError::Data(format!("{}: record {}: empty label", path.display(), out.len() + 2)));
        }
        out.push(AttendanceRecord::new(row.event_id, row.person));
    }
    Ok(out)
}

/// Load a dataset file as a labelled graph.
pub fn read_dataset(path: &Path, format: DatasetFormat) -> Result<LabeledGraph> {
    let text = read_text(path)?;
    let ctx = || path.display().to_string();
    match format {
        DatasetFormat::EdgeList => parse_edge_list(&text).context(ctx),
        DatasetFormat::Contacts => contacts_to_graph(&parse_contacts(path, &text)?).context(ctx),
        DatasetFormat::Attendance => Ok(attendance_to_graph(&parse_attendance(path, &text)?)),
    }
}

/// `node_label,community_index`.
pub fn partition_csv(partition: &Partition, labels: &NodeLabels) -> String {
    let mut out = String::from("node_label,community_index\n");
    for (i, &c) in partition.assignments().iter().enumerate() {
        writeln!(out, "{},{c}", csv_field(labels.label(i))).unwrap();
    }
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Read a partition CSV back into per-node assignments (indexed by `labels`).
pub fn parse_partition_csv(path: &Path, text: &str, labels: &NodeLabels) -> Result<Vec<usize>> {
    #[derive(Deserialize)]
    struct Row {
        node_label: String,
        community_index: usize,
    }
    let mut assignments = vec![None; labels.len()];
    for row in csv_reader(text).deserialize::<Row>() {
        let row = row.map_err(|e| csv_err(path, &e))?;
        let i = labels
            .get(&row.node_label)
            .ok_or_else(|| CliError::Data(format!("{}: unknown node `{}`", path.display(), row.node_label)))?;
        assignments[i] = Some(row.community_index);
    }
    assignments
        .into_iter()
        .enumerate()
        .map(|(i, c)| {
            c.ok_or_else(|| CliError::Data(format!("{}: node `{}` has no community", path.display(), labels.label(i))))
        })
        .collect()
}

/// `t,s,i,r` with shortest round-trip float formatting.
pub fn curves_csv(c: &MeanCurves) -> String {
    let mut out = String::from("t,s,i,r\n");
    for t in 0..c.len() {
        writeln!(out, "{t},{},{},{}", c.s_frac[t], c.i_frac[t], c.r_frac[t]).unwrap();
    }
    out
}

/// Parse a `t,s,i,r` file. Population and run count are not stored and read back as 0.
pub fn parse_curves_csv(path: &Path, text: &str) -> Result<MeanCurves> {
    #[derive(Deserialize)]
    struct Row {
        t: usize,
        s: f64,
        i: f64,
        r: f64,
    }
    let mut c = MeanCurves { s_frac: vec![], i_frac: vec![], r_frac: vec![], n_runs: 0, population: 0 };
    for row in csv_reader(text).deserialize::<Row>() {
        let row = row.map_err(|e| csv_err(path, &e))?;
        if row.t != c.len() {
            return Err(CliError::Data(format!(
                "{}: expected t = {}, found {}",
                path.display(),
                c.len(),
                row.t
            )));
        }
        c.s_frac.push(row.s);
        c.i_frac.push(row.i);
        c.r_frac.push(row.r);
    }
    if c.is_empty() {
        return Err(CliError::Data(format!("{}: no curve rows", path.display())));
    }
    Ok(c)
}

/// `run,t,S,I,R`, runs numbered from `first_run`.
pub fn trajectories_csv(trajectories: &[Trajectory], first_run: usize) -> String {
    let mut out = String::from("run,t,S,I,R\n");
    for (k, tr) in trajectories.iter().enumerate() {
        for t in 0..tr.len() {
            writeln!(out, "{},{t},{},{},{}", first_run + k, tr.s_counts[t], tr.i_counts[t], tr.r_counts[t]).unwrap();
        }
    }
    out
}

pub const MODEL_FORMAT: &str = "contactnet-model/1";

/// Serialized fitted model: parameters at full precision plus the node labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDocument {
    pub format: String,
    pub labels: NodeLabels,
    pub model: EdgeProbabilityModel,
}

impl ModelDocument {
    pub fn new(model: EdgeProbabilityModel, labels: NodeLabels) -> Self {
        ModelDocument { format: MODEL_FORMAT.into(), labels, model }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("model documents serialize");
        s.push('\n');
        s
    }

    pub fn from_json(path: &Path, text: &str) -> Result<Self> {
        let doc: ModelDocument =
            serde_json::from_str(text).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        if doc.format != MODEL_FORMAT {
            return Err(CliError::Data(format!("{}: unsupported model format `{}`", path.display(), doc.format)));
        }
        let labels = doc.labels.reindex().context(|| path.display().to_string())?;
        if labels.len() != doc.model.n_nodes() {
            return Err(CliError::Data(format!(
                "{}: {} labels for a {}-node model",
                path.display(),
                labels.len(),
                doc.model.n_nodes()
            )));
        }
        doc.model.validate().context(|| path.display().to_string())?;
        Ok(ModelDocument { labels, ..doc })
    }
}
