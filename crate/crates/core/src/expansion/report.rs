use super::{ExpansionReport, RequestStatus};

/// CSV of term requests and minted terms, ordered by row, then column,
/// then text. Header: `raw_text,column,row,status,minted_iri`.
pub fn emit_term_requests(report: &ExpansionReport) -> String {
    let mut lines: Vec<((usize, usize, &str), [String; 5])> = Vec::new();
    for t in &report.term_requests {
        let status = match t.status {
            RequestStatus::Unknown => "Unknown",
            RequestStatus::OutOfRange => "OutOfRange",
            RequestStatus::Ambiguous => "Ambiguous",
        };
        lines.push((
            (t.row, t.column_index, &t.raw_text),
            [t.raw_text.clone(), t.column.clone(), t.row.to_string(), status.into(), String::new()],
        ));
    }
    for m in &report.minted {
        lines.push((
            (m.row, m.column_index, &m.label),
            [m.label.clone(), m.column.clone(), m.row.to_string(), "Minted".into(), m.iri.to_string()],
        ));
    }
    lines.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record(["raw_text", "column", "row", "status", "minted_iri"])
        .expect("write to memory");
    for (_, record) in &lines {
        writer.write_record(record).expect("write to memory");
    }
    String::from_utf8(writer.into_inner().expect("flush to memory")).expect("csv of strings is UTF-8")
}
