//! Line-oriented helpers shared by the delimiter-separated file parsers.

/// Yields `(line_number, line)` for every non-blank line, 1-based, with a
/// trailing `\r` stripped.
pub(crate) fn numbered_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.strip_suffix('\r').unwrap_or(l)))
        .filter(|(_, l)| !l.trim().is_empty())
}

pub(crate) fn split_fields(line: &str) -> Vec<&str> {
    line.split(',').map(str::trim).collect()
}

/// Checks that `header` starts with `required` columns and contains at most
/// the listed optional trailing columns.
pub(crate) fn header_matches(header: &str, required: &[&str], optional: &[&str]) -> bool {
    let fields = split_fields(header.trim_start_matches('\u{feff}'));
    if fields.len() < required.len() || fields.len() > required.len() + optional.len() {
        return false;
    }
    fields[..required.len()] == *required && fields[required.len()..].iter().zip(optional).all(|(a, b)| a == b)
}
