//! Netlist front-end demo: parse a SPICE-subset netlist from text,
//! elaborate it against its own model cards, run the transient directive,
//! and sample the result — all through the library API.

use ferrosim::engine::transient;
use ferrosim::netlist::{elaborate, parse, ModelLibrary};
use ferrosim::SimConfig;

const NETLIST: &str = "\
loaded inverter step response
.model nm nmos vth0=0.4 kprime=3.24e-4 nsub=1.5 lambda=0.1
vdd vdd 0 1.0
vin in 0 pulse(0 1 1n 50p 50p 3n 8n)
r1 vdd out 50k
m1 in out 0 nm
cl out 0 20f
.tran 10p 6n
.end
";

fn main() {
    let netlist = parse(NETLIST).unwrap();
    println!("parsed '{}': {} elements, {} directives", netlist.title, netlist.elements.len(), netlist.directives.len());

    let models = ModelLibrary::from_netlist(&netlist).unwrap();
    let elaborated = elaborate(&netlist, &models).unwrap();
    for w in &elaborated.warnings {
        println!("warning: {w}");
    }

    let mut circuit = elaborated.circuit;
    let mut solver = SimConfig::default_config().solver;
    solver.dtmax = 10e-12;
    let wave = transient(&mut circuit, 6e-9, &solver).unwrap();

    let out = wave.node_series(&circuit, "out").unwrap();
    println!("\n{:>8} {:>10} {:>10}", "t [ns]", "vin [V]", "vout [V]");
    let vin = wave.node_series(&circuit, "in").unwrap();
    for t_ns in [0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 4.5, 5.0] {
        let t = t_ns * 1e-9;
        println!("{:>8.1} {:>10.3} {:>10.3}", t_ns, wave.sample(vin, t), wave.sample(out, t));
    }
}
