//! Parsing of list and range arguments such as `0,0.5,1` or `-4:0.5:2.5`.

use covshift_core::select::linspace_step;

/// Parse either a comma-separated list or an inclusive `start:step:end` range.
pub fn parse_values(spec: &str) -> Result<Vec<f64>, String> {
    let spec = spec.trim();
    if spec.is_empty() {
        return Err("empty value list".into());
    }
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').map(str::trim).collect();
        let [start, step, end] = parts.as_slice() else {
            return Err(format!("range '{spec}' must look like start:step:end"));
        };
        let start = parse_number(start)?;
        let step = parse_number(step)?;
        let end = parse_number(end)?;
        if step.is_nan() || step <= 0.0 {
            return Err(format!("range '{spec}' needs a positive step"));
        }
        if end < start {
            return Err(format!("range '{spec}' ends before it starts"));
        }
        return Ok(linspace_step(start, end, step));
    }
    spec.split(',').map(|v| parse_number(v.trim())).collect()
}

/// Comma-separated list of positive integers.
pub fn parse_counts(spec: &str) -> Result<Vec<usize>, String> {
    spec.split(',')
        .map(|v| {
            let v = v.trim();
            match v.parse::<usize>() {
                Ok(n) if n > 0 => Ok(n),
                _ => Err(format!("'{v}' is not a positive integer")),
            }
        })
        .collect()
}

fn parse_number(v: &str) -> Result<f64, String> {
    v.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| format!("'{v}' is not a finite number"))
}
