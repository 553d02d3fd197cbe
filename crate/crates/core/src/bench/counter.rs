use super::{assemble, component, names};
use crate::alphabet::Symbol;
use crate::mmn::{Layout, Mmn, Network};

/// A chain of `k` three-state bit cells counting the 1s of the input. Cell
/// `j` holds bit `j` of the count (least significant first) and passes its
/// carry to cell `j + 1`; the last cell has no carry output. Counts are
/// exact when consecutive 1s are separated by at least `k` zeros.
pub fn binary_counter(k: usize) -> Mmn {
    assert!(k >= 1, "a counter needs at least one bit");
    let bit = names(&["0", "1"]);
    let mut net = Network::new();
    let input = net.add_input("input");
    let cells: Vec<usize> = (1..=k)
        .map(|j| net.add_component(format!("c{j}")))
        .collect();
    let output = net.add_output("output");
    net.add_edge(input, cells[0], bit.clone());
    for j in 0..k {
        if j + 1 < k {
            net.add_edge(cells[j], cells[j + 1], bit.clone());
        }
        net.add_edge(cells[j], output, bit.clone());
    }
    let layout = Layout::new(&net).expect("counter network is valid");
    let comps = (0..k)
        .map(|j| {
            let last = j + 1 == k;
            // (carry, bit): (0,0) → (0,1) → (1,0) → (0,0) on 1; (1,0) also resets on 0
            component(
                &layout,
                j,
                (0u32, 0u32),
                |&(carry, b)| {
                    if last {
                        vec![Symbol(b)]
                    } else {
                        vec![Symbol(carry), Symbol(b)]
                    }
                },
                |&q, i| match (q, i[0].0) {
                    ((1, _), _) => (0, 0),
                    ((0, 0), 1) => (0, 1),
                    ((0, 1), 1) => (1, 0),
                    (q, _) => q,
                },
            )
        })
        .collect();
    assemble(net, comps)
}
