//! File formats, debug dumps and the benchmark harness around `mrmd-core`.

pub mod bench;
pub mod dump;
pub mod format;

use mrmd_core::bicriteria::Ratio;

/// Parses `"num/den"` or a decimal such as `"0.01"` into an exact ratio.
pub fn parse_ratio(text: &str) -> Result<Ratio, String> {
    let bad = || format!("`{text}` is not a fraction like 1/10 or a decimal like 0.1");
    let text = text.trim();
    if let Some((n, d)) = text.split_once('/') {
        let num = n.trim().parse().map_err(|_| bad())?;
        let den: u64 = d.trim().parse().map_err(|_| bad())?;
        if den == 0 {
            return Err(bad());
        }
        return Ok(Ratio::new(num, den));
    }
    let (whole, frac) = text.split_once('.').unwrap_or((text, ""));
    if frac.len() > 18 || !frac.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let den = 10u64.pow(frac.len() as u32);
    let whole: u64 = if whole.is_empty() { 0 } else { whole.parse().map_err(|_| bad())? };
    let frac: u64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
    let num = whole.checked_mul(den).and_then(|w| w.checked_add(frac)).ok_or_else(bad)?;
    Ok(Ratio::new(num, den))
}
