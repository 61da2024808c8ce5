use super::{Column, ColumnData, Dataset, DatasetError};

fn parse_number(cell: &str) -> Option<f64> {
    cell.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Parses UTF-8 CSV with a mandatory header row into a [`Dataset`].
///
/// Rows must all have the header's width. Empty cells are missing values.
pub fn load_csv(bytes: &[u8], name: &str) -> Result<Dataset, DatasetError> {
    let bytes = bytes.strip_prefix(b"\xEF\xBB\xBF").unwrap_or(bytes);
    if bytes.iter().all(u8::is_ascii_whitespace) {
        return Err(DatasetError::EmptyFile);
    }

    let mut reader = csv::ReaderBuilder::new().has_headers(true).flexible(false).from_reader(bytes);
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| DatasetError::MalformedCsv(e.to_string()))?
        .iter()
        .map(str::to_owned)
        .collect();

    let mut raw: Vec<Vec<String>> = vec![Vec::new(); header.len()];
    for record in reader.records() {
        let record = record.map_err(|e| DatasetError::MalformedCsv(e.to_string()))?;
        for (col, cell) in raw.iter_mut().zip(record.iter()) {
            col.push(cell.to_owned());
        }
    }

    let columns = header
        .into_iter()
        .zip(raw)
        .map(|(name, cells)| Column::new(name, infer(cells)))
        .collect();
    Dataset::new(name, columns)
}

fn infer(cells: Vec<String>) -> ColumnData {
    let numeric = cells.iter().all(|c| c.is_empty() || parse_number(c).is_some());
    if numeric {
        ColumnData::Numeric(cells.iter().map(|c| if c.is_empty() { None } else { parse_number(c) }).collect())
    } else {
        ColumnData::Categorical(cells.into_iter().map(|c| if c.is_empty() { None } else { Some(c) }).collect())
    }
}

impl Dataset {
    /// Serializes back to CSV. Numbers use the shortest representation that
    /// parses to the same value, so `load_csv` recovers an equal dataset.
    pub fn to_csv(&self) -> Vec<u8> {
        let mut writer = csv::Writer::from_writer(Vec::new());
        // csv::Writer into a Vec cannot fail on I/O
        writer
            .write_record(self.columns.iter().map(Column::name))
            .expect("in-memory CSV write");
        for row in 0..self.row_count {
            let record: Vec<String> = self
                .columns
                .iter()
                .map(|c| match c.data() {
                    ColumnData::Numeric(v) => v[row].map(|x| x.to_string()).unwrap_or_default(),
                    ColumnData::Categorical(v) => v[row].clone().unwrap_or_default(),
                })
                .collect();
            writer.write_record(&record).expect("in-memory CSV write");
        }
        writer.into_inner().expect("in-memory CSV flush")
    }
}
