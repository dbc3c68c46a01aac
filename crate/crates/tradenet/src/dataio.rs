//! CSV dataset files and the reduced sample.
//!
//! A dataset directory holds `sellers.csv`, `buyers.csv` and `links.csv`,
//! optionally `distances.csv` (square matrix with an id header row and
//! column) and `debts.csv` (debts on seller–buyer pairs that are not
//! empirical links). All files are UTF-8, comma-separated, LF-terminated.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use tradenet_core::{
    AgentId, BuyerAgent, Dataset, DistanceMatrix, EmpiricalLink, SellerAgent, ValidationReport,
};

pub const SELLERS_FILE: &str = "sellers.csv";
pub const BUYERS_FILE: &str = "buyers.csv";
pub const LINKS_FILE: &str = "links.csv";
pub const DISTANCES_FILE: &str = "distances.csv";
pub const DEBTS_FILE: &str = "debts.csv";

pub const SELLER_COLUMNS: [&str; 19] = [
    "id",
    "village_id",
    "subdistrict_id",
    "district_id",
    "gps_s",
    "gps_e",
    "education",
    "ethnicity",
    "transport",
    "employees",
    "prestigious_job",
    "active_group",
    "group_count",
    "age",
    "house_value",
    "hh_size",
    "hhs_vlg",
    "income",
    "total_sales",
];
pub const BUYER_COLUMNS: [&str; 2] = ["id", "price"];
pub const BUYER_LOCATION_COLUMNS: [&str; 2] = ["gps_s", "gps_e"];
pub const LINK_COLUMNS: [&str; 4] = ["seller_id", "buyer_id", "debts", "tons"];
pub const DEBT_COLUMNS: [&str; 3] = ["seller_id", "buyer_id", "debts"];

#[derive(Debug, thiserror::Error)]
pub enum DataError {
    #[error("{path}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("{path}: missing column {column:?}")]
    MissingColumn { path: PathBuf, column: String },
    #[error("{path}, line {line}: {message}")]
    Row {
        path: PathBuf,
        line: u64,
        message: String,
    },
    #[error("dataset failed validation:\n{0}")]
    Invalid(ValidationReport),
    #[error(transparent)]
    Model(#[from] tradenet_core::Error),
}

impl DataError {
    /// Whether the failure is in the file system rather than the content.
    pub fn is_io(&self) -> bool {
        matches!(self, Self::Io { .. })
            || matches!(self, Self::Csv { source, .. } if source.is_io_error())
    }
}

/// Paths of one dataset on disk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetPaths {
    pub sellers: PathBuf,
    pub buyers: PathBuf,
    pub links: PathBuf,
    pub distances: Option<PathBuf>,
    pub debts: Option<PathBuf>,
}

impl DatasetPaths {
    /// Standard file names inside `dir`; optional files only if present.
    pub fn in_dir(dir: &Path) -> Self {
        let optional = |name| Some(dir.join(name)).filter(|p: &PathBuf| p.exists());
        Self {
            sellers: dir.join(SELLERS_FILE),
            buyers: dir.join(BUYERS_FILE),
            links: dir.join(LINKS_FILE),
            distances: optional(DISTANCES_FILE),
            debts: optional(DEBTS_FILE),
        }
    }

    pub fn all(&self) -> Vec<&Path> {
        let mut v = vec![
            self.sellers.as_path(),
            self.buyers.as_path(),
            self.links.as_path(),
        ];
        v.extend(self.distances.as_deref());
        v.extend(self.debts.as_deref());
        v
    }
}

struct Table {
    path: PathBuf,
    columns: BTreeMap<String, usize>,
    reader: csv::Reader<File>,
}

struct Row<'a> {
    path: &'a Path,
    line: u64,
    record: csv::StringRecord,
    columns: &'a BTreeMap<String, usize>,
}

impl Row<'_> {
    fn error(&self, message: String) -> DataError {
        DataError::Row {
            path: self.path.to_path_buf(),
            line: self.line,
            message,
        }
    }

    fn raw(&self, column: &str) -> Result<&str, DataError> {
        let idx = self.columns[column];
        self.record
            .get(idx)
            .map(str::trim)
            .ok_or_else(|| self.error(format!("missing value for {column}")))
    }

    fn parse<T: std::str::FromStr>(&self, column: &str) -> Result<T, DataError> {
        let raw = self.raw(column)?;
        raw.parse()
            .map_err(|_| self.error(format!("{column}: cannot parse {raw:?}")))
    }

    fn flag(&self, column: &str) -> Result<bool, DataError> {
        match self.raw(column)? {
            "0" | "false" => Ok(false),
            "1" | "true" => Ok(true),
            other => Err(self.error(format!("{column}: expected 0 or 1, got {other:?}"))),
        }
    }

    fn id(&self, column: &str) -> Result<AgentId, DataError> {
        self.parse(column).map(AgentId)
    }
}

impl Table {
    fn open(path: &Path, required: &[&str]) -> Result<Self, DataError> {
        let file = File::open(path).map_err(|source| DataError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(file);
        let headers = reader.headers().map_err(|source| DataError::Csv {
            path: path.to_path_buf(),
            source,
        })?;
        let columns: BTreeMap<String, usize> = headers
            .iter()
            .enumerate()
            .map(|(i, h)| (h.trim().to_string(), i))
            .collect();
        for column in required {
            if !columns.contains_key(*column) {
                return Err(DataError::MissingColumn {
                    path: path.to_path_buf(),
                    column: column.to_string(),
                });
            }
        }
        Ok(Self {
            path: path.to_path_buf(),
            columns,
            reader,
        })
    }

    fn has(&self, column: &str) -> bool {
        self.columns.contains_key(column)
    }

    fn for_each(
        mut self,
        mut f: impl FnMut(&Row<'_>) -> Result<(), DataError>,
    ) -> Result<(), DataError> {
        for record in self.reader.records() {
            let record = record.map_err(|source| DataError::Csv {
                path: self.path.clone(),
                source,
            })?;
            let line = record.position().map_or(0, |p| p.line());
            f(&Row {
                path: &self.path,
                line,
                record,
                columns: &self.columns,
            })?;
        }
        Ok(())
    }
}

fn read_sellers(path: &Path) -> Result<Vec<SellerAgent>, DataError> {
    let mut sellers = Vec::new();
    Table::open(path, &SELLER_COLUMNS)?.for_each(|r| {
        sellers.push(SellerAgent {
            id: r.id("id")?,
            village_id: r.parse("village_id")?,
            subdistrict_id: r.parse("subdistrict_id")?,
            district_id: r.parse("district_id")?,
            gps_s: r.parse("gps_s")?,
            gps_e: r.parse("gps_e")?,
            education: r.parse("education")?,
            ethnicity: r.parse("ethnicity")?,
            transport: r.parse("transport")?,
            employees: r.parse("employees")?,
            prestigious_job: r.flag("prestigious_job")?,
            active_group: r.flag("active_group")?,
            group_count: r.parse("group_count")?,
            age: r.parse("age")?,
            house_value: r.parse("house_value")?,
            hh_size: r.parse("hh_size")?,
            hhs_vlg: r.parse("hhs_vlg")?,
            income: r.parse("income")?,
            debt_by_buyer: BTreeMap::new(),
            n_buyer_empirical: 0,
            total_sales: r.parse("total_sales")?,
        });
        Ok(())
    })?;
    Ok(sellers)
}

fn read_buyers(path: &Path) -> Result<Vec<BuyerAgent>, DataError> {
    let table = Table::open(path, &BUYER_COLUMNS)?;
    let located = BUYER_LOCATION_COLUMNS.iter().all(|c| table.has(c));
    let mut buyers = Vec::new();
    table.for_each(|r| {
        let location = if located {
            Some((r.parse("gps_s")?, r.parse("gps_e")?))
        } else {
            None
        };
        buyers.push(BuyerAgent {
            id: r.id("id")?,
            price: r.parse("price")?,
            location,
        });
        Ok(())
    })?;
    Ok(buyers)
}

fn read_distances(path: &Path) -> Result<DistanceMatrix, DataError> {
    let file = File::open(path).map_err(|source| DataError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_reader(file);
    let csv_err = |source| DataError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let row_err = |line: u64, message: String| DataError::Row {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut records = reader.records();
    let header = match records.next() {
        Some(r) => r.map_err(csv_err)?,
        None => return Err(row_err(1, "empty distance file".into())),
    };
    let ids = header
        .iter()
        .skip(1)
        .map(|h| h.trim().parse().map(AgentId))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| row_err(1, "header must list numeric agent ids".into()))?;
    let n = ids.len();
    let mut values = vec![f64::NAN; n * n];
    let mut seen = 0;
    for record in records {
        let record = record.map_err(csv_err)?;
        let line = record.position().map_or(0, |p| p.line());
        let row_id: AgentId = record
            .get(0)
            .and_then(|v| v.trim().parse().ok())
            .map(AgentId)
            .ok_or_else(|| row_err(line, "row must start with an agent id".into()))?;
        if seen >= n || ids[seen] != row_id {
            return Err(row_err(
                line,
                format!("row id {row_id} does not match column order"),
            ));
        }
        for (j, raw) in record.iter().skip(1).enumerate() {
            values[seen * n + j] = raw
                .trim()
                .parse()
                .map_err(|_| row_err(line, format!("cannot parse distance {raw:?}")))?;
        }
        for j in 0..seen {
            let (d, back) = (values[seen * n + j], values[j * n + seen]);
            if (d - back).abs() > tradenet_core::domain::DISTANCE_SYMMETRY_TOL {
                return Err(row_err(
                    line,
                    format!(
                        "asymmetric distance between {} and {}: {d} vs {back}",
                        row_id, ids[j]
                    ),
                ));
            }
        }
        seen += 1;
    }
    if seen != n {
        return Err(row_err(
            0,
            format!("expected {n} matrix rows, found {seen}"),
        ));
    }
    Ok(DistanceMatrix::new(ids, values)?)
}

/// Loads and validates a dataset. Distances come from the matrix file when
/// given, else from seller and buyer coordinates.
pub fn load_dataset(paths: &DatasetPaths) -> Result<Dataset, DataError> {
    let mut sellers = read_sellers(&paths.sellers)?;
    let buyers = read_buyers(&paths.buyers)?;
    let seller_index: BTreeMap<AgentId, usize> =
        sellers.iter().enumerate().map(|(i, s)| (s.id, i)).collect();
    let buyer_ids: BTreeSet<AgentId> = buyers.iter().map(|b| b.id).collect();

    let mut link_rows = |path: &Path, columns: &[&str], links: Option<&mut Vec<EmpiricalLink>>| {
        let mut links = links;
        Table::open(path, columns)?.for_each(|r| {
            let seller = r.id("seller_id")?;
            let buyer = r.id("buyer_id")?;
            let Some(&si) = seller_index.get(&seller) else {
                return Err(r.error(format!("unknown seller id {seller}")));
            };
            if !buyer_ids.contains(&buyer) {
                return Err(r.error(format!("unknown buyer id {buyer}")));
            }
            let debts: f64 = r.parse("debts")?;
            match links.as_deref_mut() {
                Some(links) => {
                    if debts != 0.0 {
                        sellers[si].debt_by_buyer.insert(buyer, debts);
                    }
                    links.push(EmpiricalLink {
                        seller,
                        buyer,
                        tons: r.parse("tons")?,
                    });
                }
                None => {
                    sellers[si].debt_by_buyer.insert(buyer, debts);
                }
            }
            Ok(())
        })
    };
    let mut empirical_links = Vec::new();
    link_rows(&paths.links, &LINK_COLUMNS, Some(&mut empirical_links))?;
    if let Some(debts) = &paths.debts {
        link_rows(debts, &DEBT_COLUMNS, None)?;
    }

    let distance = match &paths.distances {
        Some(path) => read_distances(path)?,
        None => DistanceMatrix::default(),
    };
    let mut dataset = Dataset {
        sellers,
        buyers,
        distance,
        empirical_links,
    };
    dataset.recount_buyers();
    let report = dataset.validate();
    if !report.is_empty() {
        return Err(DataError::Invalid(report));
    }
    Ok(dataset)
}

pub fn load_dir(dir: &Path) -> Result<Dataset, DataError> {
    load_dataset(&DatasetPaths::in_dir(dir))
}

fn flag(b: bool) -> &'static str {
    if b {
        "1"
    } else {
        "0"
    }
}

fn create(path: &Path) -> Result<csv::Writer<File>, DataError> {
    let file = File::create(path).map_err(|source| DataError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(file))
}

/// Writes rows of already formatted fields to a CSV file.
pub fn write_csv<I, R>(path: &Path, header: &[&str], rows: I) -> Result<(), DataError>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator,
    R::Item: AsRef<[u8]>,
{
    let csv_err = |source| DataError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = create(path)?;
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(row).map_err(csv_err)?;
    }
    w.flush().map_err(|source| DataError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes the dataset files into `dir` and returns their paths.
/// `distances.csv` is written when the dataset carries a matrix,
/// `debts.csv` when some debt lies off the empirical links.
pub fn save_dataset(dataset: &Dataset, dir: &Path) -> Result<DatasetPaths, DataError> {
    std::fs::create_dir_all(dir).map_err(|source| DataError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let paths = DatasetPaths {
        sellers: dir.join(SELLERS_FILE),
        buyers: dir.join(BUYERS_FILE),
        links: dir.join(LINKS_FILE),
        distances: (!dataset.distance.is_empty()).then(|| dir.join(DISTANCES_FILE)),
        debts: None,
    };

    write_csv(
        &paths.sellers,
        &SELLER_COLUMNS,
        dataset.sellers.iter().map(|s| {
            [
                s.id.to_string(),
                s.village_id.to_string(),
                s.subdistrict_id.to_string(),
                s.district_id.to_string(),
                s.gps_s.to_string(),
                s.gps_e.to_string(),
                s.education.to_string(),
                s.ethnicity.to_string(),
                s.transport.to_string(),
                s.employees.to_string(),
                flag(s.prestigious_job).to_string(),
                flag(s.active_group).to_string(),
                s.group_count.to_string(),
                s.age.to_string(),
                s.house_value.to_string(),
                s.hh_size.to_string(),
                s.hhs_vlg.to_string(),
                s.income.to_string(),
                s.total_sales.to_string(),
            ]
        }),
    )?;

    let located = !dataset.buyers.is_empty() && dataset.buyers.iter().all(|b| b.location.is_some());
    let mut buyer_header = BUYER_COLUMNS.to_vec();
    if located {
        buyer_header.extend(BUYER_LOCATION_COLUMNS);
    }
    write_csv(
        &paths.buyers,
        &buyer_header,
        dataset.buyers.iter().map(|b| {
            let mut row = vec![b.id.to_string(), b.price.to_string()];
            if let (true, Some((s, e))) = (located, b.location) {
                row.push(s.to_string());
                row.push(e.to_string());
            }
            row
        }),
    )?;

    let sellers: BTreeMap<AgentId, &SellerAgent> =
        dataset.sellers.iter().map(|s| (s.id, s)).collect();
    write_csv(
        &paths.links,
        &LINK_COLUMNS,
        dataset.empirical_links.iter().map(|l| {
            let debts = sellers.get(&l.seller).map_or(0.0, |s| s.debt_with(l.buyer));
            [
                l.seller.to_string(),
                l.buyer.to_string(),
                debts.to_string(),
                l.tons.to_string(),
            ]
        }),
    )?;

    let empirical = dataset.empirical_set();
    let off_link: Vec<[String; 3]> = dataset
        .sellers
        .iter()
        .flat_map(|s| {
            s.debt_by_buyer
                .iter()
                .filter(|(b, _)| !empirical.contains(&(s.id, **b)))
                .map(|(b, d)| [s.id.to_string(), b.to_string(), d.to_string()])
        })
        .collect();
    let debts_path = dir.join(DEBTS_FILE);
    let paths = if off_link.is_empty() {
        if debts_path.exists() {
            std::fs::remove_file(&debts_path).map_err(|source| DataError::Io {
                path: debts_path.clone(),
                source,
            })?;
        }
        paths
    } else {
        write_csv(&debts_path, &DEBT_COLUMNS, off_link)?;
        DatasetPaths {
            debts: Some(debts_path),
            ..paths
        }
    };

    if let Some(path) = &paths.distances {
        write_distances(&dataset.distance, path)?;
    }
    Ok(paths)
}

fn write_distances(matrix: &DistanceMatrix, path: &Path) -> Result<(), DataError> {
    let io_err = |source| DataError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut out = io::BufWriter::new(File::create(path).map_err(io_err)?);
    let ids = matrix.ids();
    let n = ids.len();
    let mut line = String::from("id");
    for id in ids {
        line.push(',');
        line.push_str(&id.to_string());
    }
    writeln!(out, "{line}").map_err(io_err)?;
    for (i, id) in ids.iter().enumerate() {
        line.clear();
        line.push_str(&id.to_string());
        for v in &matrix.values()[i * n..(i + 1) * n] {
            line.push(',');
            line.push_str(&v.to_string());
        }
        writeln!(out, "{line}").map_err(io_err)?;
    }
    out.flush().map_err(io_err)
}

/// Drops every buyer observed with exactly one seller, together with its
/// links and debts, then every seller left without an empirical link.
/// Applied once, not repeated until no such buyer remains.
pub fn reduced_sample(dataset: &Dataset) -> Result<Dataset, DataError> {
    let mut in_degree: BTreeMap<AgentId, usize> = BTreeMap::new();
    for l in &dataset.empirical_links {
        *in_degree.entry(l.buyer).or_default() += 1;
    }
    let dropped: BTreeSet<AgentId> = in_degree
        .iter()
        .filter(|(_, &d)| d == 1)
        .map(|(&b, _)| b)
        .collect();

    let buyers: Vec<BuyerAgent> = dataset
        .buyers
        .iter()
        .filter(|b| !dropped.contains(&b.id))
        .cloned()
        .collect();
    if buyers.is_empty() {
        return Err(tradenet_core::Error::InvalidDataset(
            "reduced sample has no buyers left".into(),
        )
        .into());
    }
    let empirical_links: Vec<EmpiricalLink> = dataset
        .empirical_links
        .iter()
        .filter(|l| !dropped.contains(&l.buyer))
        .copied()
        .collect();
    let linked: BTreeSet<AgentId> = empirical_links.iter().map(|l| l.seller).collect();
    let sellers: Vec<SellerAgent> = dataset
        .sellers
        .iter()
        .filter(|s| linked.contains(&s.id))
        .map(|s| {
            let mut s = s.clone();
            s.debt_by_buyer.retain(|b, _| !dropped.contains(b));
            s
        })
        .collect();

    let distance = if dataset.distance.is_empty() {
        DistanceMatrix::default()
    } else {
        let keep: Vec<usize> = dataset
            .distance
            .ids()
            .iter()
            .enumerate()
            .filter(|(_, id)| linked.contains(id) || buyers.iter().any(|b| b.id == **id))
            .map(|(i, _)| i)
            .collect();
        let n = dataset.distance.len();
        let values = keep
            .iter()
            .flat_map(|&i| keep.iter().map(move |&j| (i, j)))
            .map(|(i, j)| dataset.distance.values()[i * n + j])
            .collect();
        let ids = keep.iter().map(|&i| dataset.distance.ids()[i]).collect();
        DistanceMatrix::new(ids, values)?
    };

    let mut out = Dataset {
        sellers,
        buyers,
        distance,
        empirical_links,
    };
    out.recount_buyers();
    let report = out.validate();
    if !report.is_empty() {
        return Err(DataError::Invalid(report));
    }
    Ok(out)
}
