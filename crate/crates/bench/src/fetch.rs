//! Download of Matrix Market files from the sparse matrix collection.

use std::fs;
use std::io::{self, Read};
use std::path::{Path, PathBuf};

use flate2::read::GzDecoder;
use log::info;
use mpkrylov::sparse::{parse_matrix_market, MarketError};
use thiserror::Error;

/// Matrix Market mirror of the collection; archives live at
/// `{base}/{group}/{name}.tar.gz`.
pub const DEFAULT_BASE_URL: &str = "https://sparse.tamu.edu/MM";

/// Groups of the matrices this harness is usually pointed at. Other
/// matrices are named as `Group/name`.
const KNOWN_GROUPS: &[(&str, &str)] = &[("mcfe", "HB"), ("dwg961b", "Bai")];

#[derive(Debug, Error)]
pub enum FetchError {
    #[error("unknown matrix {0:?}; name it as Group/name")]
    UnknownMatrix(String),
    #[error("{url}: {msg}")]
    Http { url: String, msg: String },
    #[error("{url}: archive has no {file}")]
    MissingEntry { url: String, file: String },
    #[error("{url}: {source}")]
    Archive {
        url: String,
        #[source]
        source: io::Error,
    },
    #[error("{url}: downloaded file does not parse: {source}")]
    Parse {
        url: String,
        #[source]
        source: MarketError,
    },
    #[error("{path}: {source}")]
    Cache {
        path: String,
        #[source]
        source: io::Error,
    },
}

/// `(group, name)` for `name` or `Group/name`.
pub fn collection_id(name: &str) -> Result<(String, String), FetchError> {
    if let Some((g, n)) = name.split_once('/') {
        if !g.is_empty() && !n.is_empty() && !n.contains('/') {
            return Ok((g.to_string(), n.to_string()));
        }
        return Err(FetchError::UnknownMatrix(name.to_string()));
    }
    KNOWN_GROUPS
        .iter()
        .find(|(n, _)| n.eq_ignore_ascii_case(name))
        .map(|(n, g)| (g.to_string(), n.to_string()))
        .ok_or_else(|| FetchError::UnknownMatrix(name.to_string()))
}

/// Path a fetched matrix is cached under.
pub fn cached_path(name: &str, dest_dir: &Path) -> Result<PathBuf, FetchError> {
    let (_, n) = collection_id(name)?;
    Ok(dest_dir.join(format!("{n}.mtx")))
}

fn parses(path: &Path) -> bool {
    fs::File::open(path)
        .map(|f| parse_matrix_market(io::BufReader::new(f)).is_ok())
        .unwrap_or(false)
}

/// Returns the cached `.mtx` for `name`, downloading and extracting the
/// collection archive first if no valid cached copy exists.
pub fn fetch_matrix(name: &str, base_url: &str, dest_dir: &Path) -> Result<PathBuf, FetchError> {
    let (group, n) = collection_id(name)?;
    let target = dest_dir.join(format!("{n}.mtx"));
    if parses(&target) {
        return Ok(target);
    }
    let url = format!("{}/{group}/{n}.tar.gz", base_url.trim_end_matches('/'));
    info!("downloading {url}");
    let http = |msg: String| FetchError::Http { url: url.clone(), msg };
    let resp = ureq::get(&url).call().map_err(|e| http(e.to_string()))?;
    let mut body = Vec::new();
    resp.into_body()
        .into_reader()
        .read_to_end(&mut body)
        .map_err(|e| http(e.to_string()))?;

    let archive_err = |source| FetchError::Archive { url: url.clone(), source };
    let file = format!("{n}.mtx");
    let mut archive = tar::Archive::new(GzDecoder::new(body.as_slice()));
    let mut text = None;
    for entry in archive.entries().map_err(archive_err)? {
        let mut entry = entry.map_err(archive_err)?;
        let is_target = entry
            .path()
            .map_err(archive_err)?
            .file_name()
            .is_some_and(|f| f == file.as_str());
        if is_target {
            let mut buf = Vec::new();
            entry.read_to_end(&mut buf).map_err(archive_err)?;
            text = Some(buf);
            break;
        }
    }
    let text = text.ok_or_else(|| FetchError::MissingEntry {
        url: url.clone(),
        file: file.clone(),
    })?;
    parse_matrix_market(text.as_slice()).map_err(|source| FetchError::Parse {
        url: url.clone(),
        source,
    })?;

    let cache_err = |source| FetchError::Cache {
        path: target.display().to_string(),
        source,
    };
    fs::create_dir_all(dest_dir).map_err(cache_err)?;
    let tmp = dest_dir.join(format!(".{n}.mtx.part"));
    fs::write(&tmp, &text).map_err(cache_err)?;
    fs::rename(&tmp, &target).map_err(cache_err)?;
    Ok(target)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids() {
        assert_eq!(collection_id("mcfe").unwrap(), ("HB".into(), "mcfe".into()));
        assert_eq!(collection_id("Bai/dwg961b").unwrap(), ("Bai".into(), "dwg961b".into()));
        assert!(collection_id("nosuch").is_err());
        assert!(collection_id("a/b/c").is_err());
    }
}
