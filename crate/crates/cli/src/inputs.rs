use std::path::PathBuf;

use crate::error::CliError;

fn is_pattern(s: &str) -> bool {
    s.contains(['*', '?', '['])
}

/// Expands glob patterns (each sorted lexicographically) and keeps plain
/// paths as given, preserving argument order.
pub fn expand(args: &[String]) -> Result<Vec<PathBuf>, CliError> {
    if args.is_empty() {
        return Err(CliError::Usage("no input frames given".into()));
    }
    let mut out = Vec::new();
    for arg in args {
        if !is_pattern(arg) {
            out.push(PathBuf::from(arg));
            continue;
        }
        let mut matches = glob::glob(arg)
            .map_err(|e| CliError::Usage(format!("bad pattern {arg:?}: {e}")))?
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| CliError::Input(e.to_string()))?;
        if matches.is_empty() {
            return Err(CliError::Input(format!("no files match {arg:?}")));
        }
        matches.sort();
        out.extend(matches);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_is_usage_error() {
        assert!(matches!(expand(&[]), Err(CliError::Usage(_))));
    }

    #[test]
    fn globs_sort_lexicographically() {
        let dir = tempfile::tempdir().unwrap();
        for name in ["f10.pgm", "f02.pgm", "f01.pgm", "other.txt"] {
            std::fs::write(dir.path().join(name), b"").unwrap();
        }
        let pattern = format!("{}/f*.pgm", dir.path().display());
        let got = expand(&[pattern]).unwrap();
        let names: Vec<_> = got
            .iter()
            .map(|p| p.file_name().unwrap().to_str().unwrap().to_owned())
            .collect();
        assert_eq!(names, ["f01.pgm", "f02.pgm", "f10.pgm"]);

        let none = format!("{}/nothing*.pgm", dir.path().display());
        assert!(matches!(expand(&[none]), Err(CliError::Input(_))));
    }

    #[test]
    fn plain_paths_keep_order() {
        let got = expand(&["b.pgm".into(), "a.pgm".into()]).unwrap();
        assert_eq!(got, [PathBuf::from("b.pgm"), PathBuf::from("a.pgm")]);
    }
}
