//! Regenerates `cases/rts24_dc.case.json`.
//!
//! Network, unit list and bus load shares follow the IEEE RTS-24 data as
//! distributed with MATPOWER (`case24_ieee_rts`), including the synchronous
//! condenser at bus 14 as a zero-capacity unit, which gives 33 units. Unit
//! costs are a simplified linear set below $100/MWh. Two data-center sites
//! and a PV plant split across two buses are added on top.
//!
//! The defaults are the frozen calibration; the options exist so the
//! calibration can be re-run.

use std::path::PathBuf;

use clap::Parser;
use scuc::case_file::{
    save_case_file, BranchRecord, BusRecord, CaseFile, DataCenterRecord, GeneratorRecord, ProfileSource, RenewableRecord,
};
use scuc_core::profile::{split_pv, synthesize_dc_profile, synthesize_pv_profile};

#[derive(Parser)]
struct Args {
    #[arg(long, default_value = "crates/scuc/cases/rts24_dc.case.json")]
    out: PathBuf,
    /// System peak load (MW) before data centers.
    #[arg(long, default_value_t = 2000.0)]
    peak_load: f64,
    /// Multiplier on every branch rating.
    #[arg(long, default_value_t = 1.0)]
    rating_scale: f64,
    /// Multiplier on every unit's spinning-reserve ramp.
    #[arg(long, default_value_t = 1.0)]
    reserve_scale: f64,
    #[arg(long, default_value_t = 720.0)]
    dc_peak: f64,
    #[arg(long, default_value_t = 443.0)]
    dc_valley: f64,
    #[arg(long, default_value_t = 13614.0)]
    dc_energy: f64,
    #[arg(long, default_value_t = 850.0)]
    dc_capacity: f64,
    #[arg(long, default_value_t = 3380.0)]
    pv_capacity: f64,
    #[arg(long, default_value_t = 5.0)]
    sunrise: f64,
    #[arg(long, default_value_t = 21.0)]
    sunset: f64,
    /// Array-to-inverter ratio: the half-sine is scaled by this and clipped
    /// at `pv_capacity`, which widens the midday plateau.
    #[arg(long, default_value_t = 3.0)]
    pv_clip: f64,
    /// Plateau output as a fraction of `pv_capacity`.
    #[arg(long, default_value_t = 0.82)]
    pv_peak: f64,
    #[arg(long, value_delimiter = ',', default_value = "9,18")]
    dc_buses: Vec<u32>,
    /// `bus:share` pairs.
    #[arg(long, value_delimiter = ',', default_value = "9:0.3,18:0.7")]
    pv_shares: Vec<String>,
}

/// (from, to, x, normal MW, emergency MW)
const BRANCHES: [(u32, u32, f64, f64, f64); 38] = [
    (1, 2, 0.0139, 175.0, 200.0),
    (1, 3, 0.2112, 175.0, 220.0),
    (1, 5, 0.0845, 175.0, 220.0),
    (2, 4, 0.1267, 175.0, 220.0),
    (2, 6, 0.1920, 175.0, 220.0),
    (3, 9, 0.1190, 175.0, 220.0),
    (3, 24, 0.0839, 400.0, 600.0),
    (4, 9, 0.1037, 175.0, 220.0),
    (5, 10, 0.0883, 175.0, 220.0),
    (6, 10, 0.0605, 175.0, 200.0),
    (7, 8, 0.0614, 175.0, 220.0),
    (8, 9, 0.1651, 175.0, 220.0),
    (8, 10, 0.1651, 175.0, 220.0),
    (9, 11, 0.0839, 400.0, 600.0),
    (9, 12, 0.0839, 400.0, 600.0),
    (10, 11, 0.0839, 400.0, 600.0),
    (10, 12, 0.0839, 400.0, 600.0),
    (11, 13, 0.0476, 500.0, 625.0),
    (11, 14, 0.0418, 500.0, 625.0),
    (12, 13, 0.0476, 500.0, 625.0),
    (12, 23, 0.0966, 500.0, 625.0),
    (13, 23, 0.0865, 500.0, 625.0),
    (14, 16, 0.0389, 500.0, 625.0),
    (15, 16, 0.0173, 500.0, 625.0),
    (15, 21, 0.0490, 500.0, 625.0),
    (15, 21, 0.0490, 500.0, 625.0),
    (15, 24, 0.0519, 500.0, 625.0),
    (16, 17, 0.0259, 500.0, 625.0),
    (16, 19, 0.0231, 500.0, 625.0),
    (17, 18, 0.0144, 500.0, 625.0),
    (17, 22, 0.1053, 500.0, 625.0),
    (18, 21, 0.0259, 500.0, 625.0),
    (18, 21, 0.0259, 500.0, 625.0),
    (19, 20, 0.0396, 500.0, 625.0),
    (19, 20, 0.0396, 500.0, 625.0),
    (20, 23, 0.0216, 500.0, 625.0),
    (20, 23, 0.0216, 500.0, 625.0),
    (21, 22, 0.0678, 500.0, 625.0),
];

/// Peak MW per bus; the shares of the 2850 MW system peak.
const BUS_PEAK: [(u32, f64); 24] = [
    (1, 108.0),
    (2, 97.0),
    (3, 180.0),
    (4, 74.0),
    (5, 71.0),
    (6, 136.0),
    (7, 125.0),
    (8, 171.0),
    (9, 175.0),
    (10, 195.0),
    (11, 0.0),
    (12, 0.0),
    (13, 265.0),
    (14, 194.0),
    (15, 317.0),
    (16, 100.0),
    (17, 0.0),
    (18, 333.0),
    (19, 181.0),
    (20, 128.0),
    (21, 0.0),
    (22, 0.0),
    (23, 0.0),
    (24, 0.0),
];

/// Winter weekday hourly load, percent of peak.
const HOURLY: [f64; 24] = [
    67.0, 63.0, 60.0, 59.0, 59.0, 60.0, 74.0, 86.0, 95.0, 96.0, 96.0, 95.0, 95.0, 95.0, 93.0, 94.0, 99.0, 100.0, 100.0,
    96.0, 91.0, 83.0, 73.0, 63.0,
];

struct UnitType {
    p_min: f64,
    p_max: f64,
    cost: f64,
    noload: f64,
    startup: f64,
    /// MW/min
    ramp: f64,
    min_up: u32,
    min_dn: u32,
}

const fn ut(p_min: f64, p_max: f64, cost: f64, noload: f64, startup: f64, ramp: f64, min_up: u32, min_dn: u32) -> UnitType {
    UnitType {
        p_min,
        p_max,
        cost,
        noload,
        startup,
        ramp,
        min_up,
        min_dn,
    }
}

const U12: UnitType = ut(2.4, 12.0, 56.0, 86.0, 70.0, 1.0, 2, 2);
const U20: UnitType = ut(16.0, 20.0, 90.0, 400.0, 50.0, 3.0, 1, 1);
const U50: UnitType = ut(10.0, 50.0, 0.5, 0.0, 0.0, 3.0, 1, 1);
const U76: UnitType = ut(15.2, 76.0, 16.0, 210.0, 700.0, 2.0, 8, 4);
const U100: UnitType = ut(25.0, 100.0, 44.0, 780.0, 1000.0, 7.0, 8, 8);
const U155: UnitType = ut(54.3, 155.0, 13.5, 380.0, 1600.0, 3.0, 8, 8);
const U197: UnitType = ut(69.0, 197.0, 44.0, 600.0, 2000.0, 3.0, 12, 10);
const U350: UnitType = ut(140.0, 350.0, 12.5, 800.0, 4000.0, 4.0, 24, 24);
const U400: UnitType = ut(100.0, 400.0, 5.5, 280.0, 5000.0, 20.0, 24, 24);
const SYNC: UnitType = ut(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1, 1);

const UNITS: [(u32, &UnitType); 33] = [
    (1, &U20),
    (1, &U20),
    (1, &U76),
    (1, &U76),
    (2, &U20),
    (2, &U20),
    (2, &U76),
    (2, &U76),
    (7, &U100),
    (7, &U100),
    (7, &U100),
    (13, &U197),
    (13, &U197),
    (13, &U197),
    (14, &SYNC),
    (15, &U12),
    (15, &U12),
    (15, &U12),
    (15, &U12),
    (15, &U12),
    (15, &U155),
    (16, &U155),
    (18, &U400),
    (21, &U400),
    (22, &U50),
    (22, &U50),
    (22, &U50),
    (22, &U50),
    (22, &U50),
    (22, &U50),
    (23, &U155),
    (23, &U155),
    (23, &U350),
];

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args = Args::parse();
    let horizon = 24;
    let scale = args.peak_load / 2850.0;

    let buses = BUS_PEAK
        .iter()
        .map(|&(id, peak)| BusRecord {
            id,
            demand_mw: ProfileSource::Inline(HOURLY.iter().map(|h| round6(peak * scale * h / 100.0)).collect()),
        })
        .collect();

    let branches = BRANCHES
        .iter()
        .enumerate()
        .map(|(i, &(from_bus, to_bus, x, normal, emergency))| BranchRecord {
            id: i as u32 + 1,
            from_bus,
            to_bus,
            reactance_pu: x,
            rating_normal_mw: normal * args.rating_scale,
            rating_emergency_mw: emergency * args.rating_scale,
            // the 7-8 line is the only connection of bus 7
            contingency_eligible: !(from_bus == 7 && to_bus == 8),
        })
        .collect();

    let generators = UNITS
        .iter()
        .enumerate()
        .map(|(i, &(bus, t))| {
            let hourly = (60.0 * t.ramp).min(t.p_max);
            let start_stop = t.p_min.max(0.5 * t.p_max);
            GeneratorRecord {
                id: i as u32 + 1,
                bus,
                p_min_mw: t.p_min,
                p_max_mw: t.p_max,
                cost_energy_usd_per_mwh: t.cost,
                cost_noload_usd_per_h: t.noload,
                cost_startup_usd: t.startup,
                ramp_hourly_mw_per_h: hourly,
                ramp_startup_mw: start_stop,
                ramp_shutdown_mw: start_stop,
                reserve_ramp_mw: (10.0 * t.ramp * args.reserve_scale).min(t.p_max),
                min_up_h: t.min_up,
                min_dn_h: t.min_dn,
            }
        })
        .collect();

    let workload: Vec<f64> = synthesize_dc_profile(args.dc_peak, args.dc_valley, args.dc_energy, horizon)?;
    let dc_sites = args
        .dc_buses
        .iter()
        .map(|&bus| DataCenterRecord {
            bus,
            capacity_mw: args.dc_capacity,
            workload_mw: ProfileSource::Inline(workload.clone()),
        })
        .collect();

    let shares = args
        .pv_shares
        .iter()
        .map(|s| {
            let (bus, share) = s.split_once(':').ok_or("pv share must be bus:fraction")?;
            Ok((bus.parse()?, share.parse()?))
        })
        .collect::<Result<Vec<(u32, f64)>, Box<dyn std::error::Error>>>()?;
    let plateau = args.pv_capacity * args.pv_peak;
    let pv: Vec<f64> = synthesize_pv_profile(plateau * args.pv_clip, args.sunrise, args.sunset, horizon)?
        .into_iter()
        .map(|p| round6(p.min(plateau)))
        .collect();
    let renewable_sites = split_pv(&pv, &shares)?
        .into_iter()
        .map(|(bus, available)| RenewableRecord {
            bus,
            available_mw: ProfileSource::Inline(available),
        })
        .collect();

    let file = CaseFile {
        name: "rts24_dc".into(),
        description: Some(format!(
            "IEEE RTS-24 with two data-center sites and a split PV plant; peak load {} MW, rating scale {}, reserve scale {}, \
             PV {} MW installed, plateau {} x installed, clip ratio {}, daylight {}-{} h",
            args.peak_load,
            args.rating_scale,
            args.reserve_scale,
            args.pv_capacity,
            args.pv_peak,
            args.pv_clip,
            args.sunrise,
            args.sunset
        )),
        horizon,
        mva_base: 100.0,
        reference_bus: 13,
        buses,
        branches,
        generators,
        dc_sites,
        renewable_sites,
    };
    save_case_file(&file, &args.out)?;
    let loaded = scuc::case_file::load_case(&args.out)?;
    for w in &loaded.warnings {
        eprintln!("warning: {w}");
    }
    println!(
        "wrote {} ({} buses, {} branches, {} units, {} contingencies)",
        args.out.display(),
        loaded.case.buses.len(),
        loaded.case.branches.len(),
        loaded.case.generators.len(),
        loaded.case.contingencies().len()
    );
    Ok(())
}

fn round6(x: f64) -> f64 {
    (x * 1e6).round() / 1e6
}
