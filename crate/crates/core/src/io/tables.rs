//! CSV result tables. Columns are fixed per table, numbers carry six
//! decimals and the header is written even when there are no rows.

use std::io::Write;

use crate::analysis::{CapabilityResult, LineCapacitySweep, Schedule, SweepCurve, SweepPoint, UtilityProfile};
use crate::instance::FeederContext;

/// Six decimals, with negative zero printed as zero.
pub fn format_number(x: f64) -> String {
    let s = format!("{x:.6}");
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

fn flag(b: bool) -> String {
    if b { "1" } else { "0" }.to_string()
}

fn optional(x: Option<f64>) -> String {
    x.map(format_number).unwrap_or_default()
}

/// One row per period: exchange, then each unit, storage unit and
/// adjustable load in instance order.
pub fn write_schedule<W: Write>(out: W, schedule: &Schedule) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["period".to_string(), "exchange".to_string()];
    for u in &schedule.units {
        header.extend(["power", "committed"].map(|c| format!("{}_{c}", u.id)));
    }
    for s in &schedule.storage {
        header.extend(
            ["discharge", "charge", "net_power", "discharging", "charging", "energy"].map(|c| format!("{}_{c}", s.id)),
        );
    }
    for d in &schedule.loads {
        header.extend(["power", "on"].map(|c| format!("{}_{c}", d.id)));
    }
    w.write_record(&header)?;
    for k in 0..schedule.periods() {
        let mut row = vec![(k + 1).to_string(), format_number(schedule.exchange[k])];
        for u in &schedule.units {
            row.push(format_number(u.power[k]));
            row.push(flag(u.committed[k]));
        }
        for s in &schedule.storage {
            row.push(format_number(s.discharge[k]));
            row.push(format_number(s.charge[k]));
            row.push(format_number(s.discharge[k] - s.charge[k]));
            row.push(flag(s.discharging[k]));
            row.push(flag(s.charging[k]));
            row.push(format_number(s.energy[k]));
        }
        for d in &schedule.loads {
            row.push(format_number(d.power[k]));
            row.push(flag(d.on[k]));
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Per-period directional maxima of the exchange change.
pub fn write_capability<W: Write>(out: W, result: &CapabilityResult) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["period", "up", "down"])?;
    for p in &result.periods {
        w.write_record([p.period.to_string(), format_number(p.up), format_number(p.down)])?;
    }
    w.flush()?;
    Ok(())
}

fn point_fields(p: &SweepPoint) -> [String; 2] {
    [optional(p.value), p.status.as_str().to_string()]
}

/// `parameter,value,status`; the value is empty unless the point solved.
pub fn write_curve<W: Write>(out: W, curve: &SweepCurve) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["parameter", "value", "status"])?;
    for p in &curve.points {
        let [value, status] = point_fields(p);
        w.write_record([format_number(p.parameter), value, status])?;
    }
    w.flush()?;
    Ok(())
}

/// Both series of a transfer-limit sweep, one row per limit.
pub fn write_line_capacity_sweep<W: Write>(out: W, sweep: &LineCapacitySweep) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["transfer_limit", "capability", "capability_status", "cost", "cost_status"])?;
    for (r, c) in sweep.capability.points.iter().zip(&sweep.cost.points) {
        let [rv, rs] = point_fields(r);
        let [cv, cs] = point_fields(c);
        w.write_record([format_number(r.parameter), rv, rs, cv, cs])?;
    }
    w.flush()?;
    Ok(())
}

/// Exchange, feeder load and the utility's net load per period; the ramp
/// column is empty in the first period.
pub fn write_utility_profile<W: Write>(
    out: W,
    schedule: &Schedule,
    feeder: &FeederContext,
    profile: &UtilityProfile,
) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["period", "exchange", "feeder_load", "utility_net_load", "utility_ramp"])?;
    for k in 0..profile.net_load.len() {
        let ramp = if k == 0 { None } else { profile.ramps.get(k - 1).copied() };
        w.write_record([
            (k + 1).to_string(),
            format_number(schedule.exchange[k]),
            format_number(feeder.customer_net_load[k]),
            format_number(profile.net_load[k]),
            optional(ramp),
        ])?;
    }
    w.flush()?;
    Ok(())
}
