//! Dataset manifest: a CSV listing images, their edge-map ground truths, and
//! their split role.
//!
//! Columns: `image_id,path,gt_path,role` with a header row. Paths are
//! resolved relative to the manifest's directory. Role is `train`, `val`, or
//! `auto`; a manifest must be either fully explicit (train/val) or fully
//! `auto`, in which case images are split 16/4 (proportionally for fewer
//! images) under the run seed.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use thermoedge_core::data::netpbm;
use thermoedge_core::{extract_patches, split_by_image, PatchDataset};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Train,
    Val,
    Auto,
}

#[derive(Debug, Clone)]
pub struct ManifestEntry {
    pub image_id: String,
    pub path: PathBuf,
    pub gt_path: PathBuf,
    pub role: Role,
}

#[derive(Debug, Deserialize)]
struct RawRow {
    image_id: String,
    path: String,
    gt_path: String,
    role: String,
}

/// Parses the manifest CSV.
pub fn parse(path: &Path) -> Result<Vec<ManifestEntry>, CliError> {
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::data(format!("cannot read manifest {}: {e}", path.display())))?;

    let mut entries = Vec::new();
    for (index, row) in reader.deserialize::<RawRow>().enumerate() {
        let row = row.map_err(|e| {
            CliError::config(format!("manifest {} row {}: {e}", path.display(), index + 1))
        })?;
        let role = match row.role.as_str() {
            "train" => Role::Train,
            "val" => Role::Val,
            "auto" => Role::Auto,
            other => {
                return Err(CliError::config(format!(
                    "manifest {} row {}: unknown role {other:?} (expected train, val or auto)",
                    path.display(),
                    index + 1
                )))
            }
        };
        entries.push(ManifestEntry {
            image_id: row.image_id,
            path: base.join(row.path),
            gt_path: base.join(row.gt_path),
            role,
        });
    }
    if entries.is_empty() {
        return Err(CliError::config(format!(
            "manifest {} lists no images",
            path.display()
        )));
    }
    let autos = entries.iter().filter(|e| e.role == Role::Auto).count();
    if autos != 0 && autos != entries.len() {
        return Err(CliError::config(
            "manifest mixes auto with explicit roles; use one convention".to_string(),
        ));
    }
    Ok(entries)
}

fn load_entry(entry: &ManifestEntry) -> Result<PatchDataset, CliError> {
    let image = netpbm::load_image(&entry.path).map_err(|e| CliError::data(e.to_string()))?;
    let gt = netpbm::load_image(&entry.gt_path).map_err(|e| CliError::data(e.to_string()))?;
    extract_patches(&image, &gt, &entry.image_id).map_err(|e| {
        CliError::data(format!("image {}: {e}", entry.image_id))
    })
}

/// Loads every image pair and produces the train/validation datasets.
///
/// `split_seed` drives the image-granular shuffle for `auto` manifests.
pub fn load_datasets(
    entries: &[ManifestEntry],
    train_images: usize,
    val_images: usize,
    split_seed: u64,
) -> Result<(PatchDataset, PatchDataset), CliError> {
    if entries.iter().any(|e| e.role == Role::Auto) {
        let datasets: Vec<(String, PatchDataset)> = entries
            .iter()
            .map(|e| Ok((e.image_id.clone(), load_entry(e)?)))
            .collect::<Result<_, CliError>>()?;
        split_by_image(&datasets, train_images, val_images, split_seed)
            .map_err(|e| CliError::data(e.to_string()))
    } else {
        let mut train = PatchDataset::default();
        let mut val = PatchDataset::default();
        for entry in entries {
            let dataset = load_entry(entry)?;
            match entry.role {
                Role::Train => train.extend_from(&dataset),
                Role::Val => val.extend_from(&dataset),
                Role::Auto => unreachable!("mixed manifests rejected at parse"),
            }
        }
        if train.is_empty() || val.is_empty() {
            return Err(CliError::config(
                "manifest needs at least one train and one val image".to_string(),
            ));
        }
        Ok((train, val))
    }
}

/// The analysis set of a manifest: the same patches training saw.
pub fn load_analysis_set(
    entries: &[ManifestEntry],
    train_images: usize,
    val_images: usize,
    split_seed: u64,
) -> Result<PatchDataset, CliError> {
    Ok(load_datasets(entries, train_images, val_images, split_seed)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_manifest(dir: &Path, body: &str) -> PathBuf {
        let path = dir.join("manifest.csv");
        let mut file = std::fs::File::create(&path).unwrap();
        write!(file, "{body}").unwrap();
        path
    }

    #[test]
    fn parses_roles_and_relative_paths() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_manifest(
            dir.path(),
            "image_id,path,gt_path,role\na,images/a.pgm,gt/a.pbm,train\nb,images/b.pgm,gt/b.pbm,val\n",
        );
        let entries = parse(&path).unwrap();
        assert_eq!(entries.len(), 2);
        assert_eq!(entries[0].role, Role::Train);
        assert_eq!(entries[0].path, dir.path().join("images/a.pgm"));
        assert_eq!(entries[1].role, Role::Val);
    }

    #[test]
    fn rejects_mixed_roles_and_unknown_roles() {
        let dir = tempfile::tempdir().unwrap();
        let mixed = write_manifest(
            dir.path(),
            "image_id,path,gt_path,role\na,a.pgm,a.pbm,auto\nb,b.pgm,b.pbm,train\n",
        );
        assert!(parse(&mixed).is_err());

        let unknown = write_manifest(
            dir.path(),
            "image_id,path,gt_path,role\na,a.pgm,a.pbm,test\n",
        );
        assert!(parse(&unknown).is_err());
    }
}
