//! Reporting helpers for the acceptance suite in `tests/acceptance.rs`.
//!
//! Run it with `cargo test -p voter-validation --test acceptance -- --nocapture`;
//! every criterion prints one `[PASS]` or `[FAIL]` line.

/// Prints the verdict line for criterion `id` and panics if it failed.
pub fn verdict(id: &str, title: &str, passed: bool, detail: &str) {
    println!("{}", verdict_line(id, title, passed, detail));
    assert!(passed, "{id} {title}: {detail}");
}

pub fn verdict_line(id: &str, title: &str, passed: bool, detail: &str) -> String {
    format!("[{}] {id} {title}: {detail}", if passed { "PASS" } else { "FAIL" })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_format() {
        assert_eq!(verdict_line("AC-01", "limit", true, "ok"), "[PASS] AC-01 limit: ok");
        assert!(verdict_line("AC-10", "x", false, "y").starts_with("[FAIL] AC-10"));
    }
}
