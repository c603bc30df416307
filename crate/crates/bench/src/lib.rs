//! Scenario builders shared by the benchmarks.

use lis_core::circuit::{assemble, loss_resistance_from_efficiency, ImpedanceSystem};
use lis_core::em::{linear_array, planar_array, ue_line, Geometry};
use lis_core::precoders::Downlink;
use lis_core::{ChannelModel, PhysicalConfig};

/// `side x side` surface of 4λ, one user at 2λ on the axis.
pub fn planar_system(side: usize, efficiency: f64) -> ImpedanceSystem {
    let geometry = Geometry::new(
        planar_array(4.0, 4.0, side, side).expect("valid grid"),
        ue_line(2.0, 0.0, 1).expect("valid user"),
    )
    .expect("valid geometry");
    system(&geometry, efficiency)
}

/// 4λ line of `count` elements, `users` users on a 10λ segment at 20λ.
pub fn linear_system(count: usize, users: usize, efficiency: f64) -> ImpedanceSystem {
    let geometry = Geometry::new(
        linear_array(4.0, count).expect("valid array"),
        ue_line(20.0, 10.0, users).expect("valid users"),
    )
    .expect("valid geometry");
    system(&geometry, efficiency)
}

fn system(geometry: &Geometry, efficiency: f64) -> ImpedanceSystem {
    let phys = PhysicalConfig::default();
    let r_l = loss_resistance_from_efficiency(efficiency, 1.0).expect("valid efficiency");
    assemble(geometry, &phys, r_l).expect("assembly succeeds")
}

pub fn downlink(sys: &ImpedanceSystem) -> Downlink {
    let model = ChannelModel::new(sys, true).expect("channel");
    Downlink::new(model.h, model.r_p, sys.r_l).expect("downlink")
}
