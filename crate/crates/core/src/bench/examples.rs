use super::{assemble, component, names, sym};
use crate::alphabet::Symbol;
use crate::mmn::{Layout, Mmn, Network};
use crate::moore::DetMoore;

/// Two components exchanging numbers. The second component has a state
/// without outgoing transitions, so this network is partial.
pub fn mmn_ex() -> Mmn {
    let mut net = Network::new();
    let i1 = net.add_input("i1");
    let i2 = net.add_input("i2");
    let c1 = net.add_component("c1");
    let c2 = net.add_component("c2");
    let o1 = net.add_output("o1");
    let o2 = net.add_output("o2");
    net.add_edge(i1, c1, names(&["a", "b"]));
    net.add_edge(i2, c2, names(&["c", "d"]));
    net.add_edge(c1, o1, names(&["x", "y"]));
    net.add_edge(c2, o2, names(&["z", "w"]));
    net.add_edge(c1, c2, names(&["1", "2"]));
    net.add_edge(c2, c1, names(&["3", "4"]));
    let layout = Layout::new(&net).expect("example network is valid");

    // c1 reads (i1, c2→c1) and writes (c1→o1, c1→c2)
    let (ins, outs) = (layout.input_alphabet(0), layout.output_alphabet(0));
    let enc = |o: &str| outs.parse_token(o).unwrap();
    let mut b = DetMoore::builder(ins.clone(), outs.clone());
    let a = b.add_state(enc("x,1"));
    let bb = b.add_state(enc("y,2"));
    let a3 = ins.parse_token("a,3").unwrap();
    for i in ins.symbols() {
        b.add_transition(a, i, if i == a3 { bb } else { a });
        b.add_transition(bb, i, bb);
    }
    let m1 = b.build().expect("c1 is well formed");

    // c2 reads (i2, c1→c2) and writes (c2→o2, c2→c1)
    let (ins, outs) = (layout.input_alphabet(1), layout.output_alphabet(1));
    let enc = |o: &str| outs.parse_token(o).unwrap();
    let mut b = DetMoore::builder(ins.clone(), outs.clone());
    let p = b.add_state(enc("z,3"));
    let q = b.add_state(enc("w,3"));
    let r = b.add_state(enc("z,4"));
    let s = b.add_state(enc("w,4"));
    let c_two = ins.parse_token("c,2").unwrap();
    let one = sym(&ins.factors()[1], "1");
    for i in ins.symbols() {
        b.add_transition(p, i, if i == c_two { q } else { p });
        b.add_transition(q, i, if ins.project(i, 1) == one { r } else { s });
        b.add_transition(s, i, s);
    }
    let m2 = b.build().expect("c2 is well formed");
    assemble(net, vec![m1, m2])
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum Counter {
    Init,
    /// Counting while the latch is on.
    Main(u32),
    /// Counting after seeing the latch off outside the initial state.
    Spare(u32),
}

const MAIN: u32 = 4;
const SPARE: u32 = 8;

/// A latch feeding a counter. The counter starts counting once the latch
/// is on; seeing the latch off afterwards sends it into a second, larger
/// counter that the composed system can never reach because the latch
/// stays on forever.
pub fn counter_with_init() -> Mmn {
    let mut net = Network::new();
    let press = net.add_input("press");
    let tick = net.add_input("tick");
    let latch = net.add_component("latch");
    let counter = net.add_component("counter");
    let count = net.add_output("count");
    net.add_edge(press, latch, names(&["press", "idle"]));
    net.add_edge(tick, counter, names(&["inc", "noop"]));
    net.add_edge(latch, counter, names(&["OFF", "ON"]));
    let mut outs = vec!["init".to_string()];
    outs.extend((0..MAIN).map(|k| k.to_string()));
    outs.extend((0..SPARE).map(|k| format!("p{k}")));
    let count_alpha = crate::alphabet::Alphabet::flat(outs).expect("names are valid");
    net.add_edge(counter, count, count_alpha);
    let layout = Layout::new(&net).expect("example network is valid");

    let on = Symbol(1);
    let pressed = Symbol(0);
    let m1 = component(
        &layout,
        0,
        false,
        |lit| vec![Symbol(u32::from(*lit))],
        |lit, i| *lit || i[0] == pressed,
    );
    let inc = Symbol(0);
    let m2 = component(
        &layout,
        1,
        Counter::Init,
        |q| {
            vec![match q {
                Counter::Init => Symbol(0),
                Counter::Main(k) => Symbol(1 + k),
                Counter::Spare(k) => Symbol(1 + MAIN + k),
            }]
        },
        |q, i| {
            let step = u32::from(i[0] == inc);
            match *q {
                Counter::Init if i[1] == on => Counter::Main(0),
                Counter::Init => Counter::Init,
                Counter::Main(k) if i[1] == on => Counter::Main((k + step) % MAIN),
                Counter::Main(k) => Counter::Spare(k),
                Counter::Spare(k) => Counter::Spare((k + step) % SPARE),
            }
        },
    );
    assemble(net, vec![m1, m2])
}
