use crate::error::{Error, Result};

/// Index bookkeeping for embedding a k-qubit operator into an n-qubit register.
///
/// Qubit 0 is the most significant bit of a basis index. `offsets[l]` is the
/// register index contribution of local basis state `l` (whose most significant
/// bit belongs to `sites[0]`); `bases` enumerates every register index with all
/// site bits cleared.
#[derive(Debug, Clone)]
pub(crate) struct LocalLayout {
    pub offsets: Vec<usize>,
    pub bases: Vec<usize>,
}

impl LocalLayout {
    pub fn new(n: usize, sites: &[usize]) -> Result<Self> {
        validate_sites(n, sites)?;
        let k = sites.len();
        let masks: Vec<usize> = sites.iter().map(|&s| 1usize << (n - 1 - s)).collect();
        let offsets = (0..1usize << k)
            .map(|l| {
                masks
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| l >> (k - 1 - j) & 1 == 1)
                    .map(|(_, m)| m)
                    .sum()
            })
            .collect();
        let site_mask: usize = masks.iter().sum();
        let free: Vec<usize> = (0..n).map(|b| 1usize << b).filter(|m| m & site_mask == 0).collect();
        let bases = (0..1usize << (n - k))
            .map(|r| {
                free.iter()
                    .enumerate()
                    .filter(|(j, _)| r >> j & 1 == 1)
                    .map(|(_, m)| m)
                    .sum()
            })
            .collect();
        Ok(Self { offsets, bases })
    }
}

pub(crate) fn validate_sites(n: usize, sites: &[usize]) -> Result<()> {
    for (i, &s) in sites.iter().enumerate() {
        if s >= n {
            return Err(Error::SiteOutOfRange { site: s, n });
        }
        if sites[..i].contains(&s) {
            return Err(Error::DuplicateSite(s));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn offsets_follow_site_order() {
        let l = LocalLayout::new(3, &[2, 0]).unwrap();
        // local |01> sets sites[1] = qubit 0, the register MSB
        assert_eq!(l.offsets, vec![0, 4, 1, 5]);
        assert_eq!(l.bases, vec![0, 2]);
    }

    #[test]
    fn rejects_bad_sites() {
        assert!(matches!(LocalLayout::new(2, &[2]), Err(Error::SiteOutOfRange { .. })));
        assert!(matches!(LocalLayout::new(3, &[1, 1]), Err(Error::DuplicateSite(1))));
    }
}
