//! Artifact plumbing: reproducible CSV formatting and minimal SVG plots.
//!
//! CSV output is RFC-4180 with '.' decimal separators and 12 significant
//! digits, so files are byte-identical across runs and platforms for equal
//! inputs. SVG output is a convenience for eyeballing curves; nothing parses
//! it back.

use std::fmt::Write as _;

/// Number of significant digits in CSV numeric output.
pub const CSV_SIG_DIGITS: usize = 12;

/// Formats a float with `sig` significant digits, printf-%g style: plain
/// decimal notation for moderate exponents, scientific otherwise, trailing
/// zeros stripped.
pub fn format_sig(x: f64, sig: usize) -> String {
    assert!(sig >= 1, "need at least one significant digit");
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".to_string()
        } else if x > 0.0 {
            "inf".to_string()
        } else {
            "-inf".to_string()
        };
    }
    let formatted = format!("{:.*e}", sig - 1, x);
    let (mantissa, exp_str) = formatted
        .split_once('e')
        .expect("exponential format always contains e");
    let exp: i32 = exp_str.parse().expect("valid exponent");
    let neg = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let digits = digits.trim_end_matches('0');
    let digits = if digits.is_empty() { "0" } else { digits };
    let sign = if neg { "-" } else { "" };

    // %g switches to scientific outside exponent range [-4, sig).
    if exp < -4 || exp >= sig as i32 {
        if digits.len() == 1 {
            return format!("{sign}{digits}e{exp}");
        }
        return format!("{sign}{}.{}e{exp}", &digits[..1], &digits[1..]);
    }

    let mut out = String::new();
    out.push_str(sign);
    if exp < 0 {
        out.push_str("0.");
        for _ in 0..(-exp - 1) {
            out.push('0');
        }
        out.push_str(digits);
    } else {
        let int_len = (exp as usize) + 1;
        if digits.len() <= int_len {
            out.push_str(digits);
            for _ in 0..(int_len - digits.len()) {
                out.push('0');
            }
        } else {
            out.push_str(&digits[..int_len]);
            out.push('.');
            out.push_str(&digits[int_len..]);
        }
    }
    out
}

/// Formats one CSV row of floats at [`CSV_SIG_DIGITS`].
pub fn csv_row(values: &[f64]) -> String {
    let mut out = String::new();
    for (k, v) in values.iter().enumerate() {
        if k > 0 {
            out.push(',');
        }
        out.push_str(&format_sig(*v, CSV_SIG_DIGITS));
    }
    out.push_str("\r\n");
    out
}

/// Builds a complete CSV document from a header and float rows (RFC-4180
/// CRLF line endings).
pub fn csv_document(header: &[&str], rows: impl Iterator<Item = Vec<f64>>) -> String {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push_str("\r\n");
    for row in rows {
        out.push_str(&csv_row(&row));
    }
    out
}

/// One named curve for [`svg_line_plot`].
pub struct SvgSeries<'a> {
    pub label: &'a str,
    pub xs: &'a [f64],
    pub ys: &'a [f64],
    /// CSS color, e.g. "#1f77b4".
    pub color: &'a str,
}

/// Renders a minimal standalone SVG line plot with axis extent labels.
pub fn svg_line_plot(title: &str, x_label: &str, y_label: &str, series: &[SvgSeries]) -> String {
    let (w, h) = (640.0f64, 400.0f64);
    let (ml, mr, mt, mb) = (60.0f64, 15.0f64, 30.0f64, 45.0f64);
    let mut xmin = f64::INFINITY;
    let mut xmax = f64::NEG_INFINITY;
    let mut ymin = f64::INFINITY;
    let mut ymax = f64::NEG_INFINITY;
    for s in series {
        for &x in s.xs {
            xmin = xmin.min(x);
            xmax = xmax.max(x);
        }
        for &y in s.ys {
            ymin = ymin.min(y);
            ymax = ymax.max(y);
        }
    }
    if !xmin.is_finite() || xmin == xmax {
        xmin = 0.0;
        xmax = 1.0;
    }
    if !ymin.is_finite() || ymin == ymax {
        ymin -= 0.5;
        ymax += 0.5;
    }
    let px = |x: f64| ml + (x - xmin) / (xmax - xmin) * (w - ml - mr);
    let py = |y: f64| h - mb - (y - ymin) / (ymax - ymin) * (h - mt - mb);

    let mut svg = String::new();
    let _ = write!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = write!(
        svg,
        r#"<rect width="{w}" height="{h}" fill="white"/><text x="{}" y="20" text-anchor="middle" font-family="sans-serif" font-size="14">{title}</text>"#,
        w / 2.0
    );
    // Axes.
    let _ = write!(
        svg,
        r#"<line x1="{ml}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/><line x1="{ml}" y1="{mt}" x2="{ml}" y2="{y0}" stroke="black"/>"#,
        y0 = h - mb,
        x1 = w - mr,
    );
    let _ = write!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="12">{x_label}</text>"#,
        (ml + w - mr) / 2.0,
        h - 10.0
    );
    let _ = write!(
        svg,
        r#"<text x="15" y="{}" text-anchor="middle" font-family="sans-serif" font-size="12" transform="rotate(-90 15 {})">{y_label}</text>"#,
        (mt + h - mb) / 2.0,
        (mt + h - mb) / 2.0
    );
    for (v, x, y, anchor) in [
        (xmin, ml, h - mb + 16.0, "middle"),
        (xmax, w - mr, h - mb + 16.0, "middle"),
        (ymin, ml - 6.0, h - mb, "end"),
        (ymax, ml - 6.0, mt + 4.0, "end"),
    ] {
        let _ = write!(
            svg,
            r#"<text x="{x}" y="{y}" text-anchor="{anchor}" font-family="sans-serif" font-size="11">{}</text>"#,
            format_sig(v, 4)
        );
    }
    for (si, s) in series.iter().enumerate() {
        let mut points = String::new();
        for (x, y) in s.xs.iter().zip(s.ys.iter()) {
            let _ = write!(points, "{:.2},{:.2} ", px(*x), py(*y));
        }
        let _ = write!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="1.5"/>"#,
            points.trim_end(),
            s.color
        );
        let _ = write!(
            svg,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11" fill="{}">{}</text>"#,
            w - mr - 150.0,
            mt + 14.0 * (si as f64 + 1.0),
            s.color,
            s.label
        );
    }
    svg.push_str("</svg>");
    svg
}
