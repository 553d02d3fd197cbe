use super::{assemble, component, names, sym};
use crate::alphabet::{Alphabet, Symbol};
use crate::mmn::{Layout, Mmn, Network};

pub(crate) const NONE: &str = "⊥";

/// The two publishers. The brightness sensor publishes with one
/// acknowledgement, the motion sensor with the two-phase handshake.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Client {
    Brightness,
    Motion,
}

impl Client {
    fn other(self) -> Client {
        match self {
            Client::Brightness => Client::Motion,
            Client::Motion => Client::Brightness,
        }
    }

    fn values(self) -> [&'static str; 2] {
        match self {
            Client::Brightness => ["bright", "dark"],
            Client::Motion => ["motion", "no_motion"],
        }
    }
}

fn publisher_alphabet(client: Client) -> Alphabet {
    let [a, b] = client.values();
    let mut v = vec!["Connect".to_string()];
    for qos in 0..3 {
        v.push(format!("PubQoS{qos}({a})"));
        v.push(format!("PubQoS{qos}({b})"));
    }
    v.extend(["PubRel", "Disconnect", NONE].map(String::from));
    Alphabet::flat(v).expect("names are valid")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Msg {
    Connect,
    Publish { qos: u32, value: u32 },
    PubRel,
    Disconnect,
    Nothing,
}

fn parse_msg(s: Symbol) -> Msg {
    match s.0 {
        0 => Msg::Connect,
        1..=6 => Msg::Publish {
            qos: (s.0 - 1) / 2,
            value: (s.0 - 1) % 2,
        },
        7 => Msg::PubRel,
        8 => Msg::Disconnect,
        _ => Msg::Nothing,
    }
}

/// Session phase of the connected publisher; `u32` is the published value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Phase {
    Connected,
    Forwarded(u32),
    Acked(u32),
    Received(u32),
    Completed(u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Broker {
    Idle { last: Client },
    Session { client: Client, phase: Phase },
}

fn broker_step(q: &Broker, from_brightness: Msg, from_motion: Msg) -> Broker {
    match *q {
        Broker::Idle { last } => {
            let b = from_brightness == Msg::Connect;
            let m = from_motion == Msg::Connect;
            let client = match (b, m) {
                (true, true) => last.other(),
                (true, false) => Client::Brightness,
                (false, true) => Client::Motion,
                (false, false) => return *q,
            };
            Broker::Session {
                client,
                phase: Phase::Connected,
            }
        }
        Broker::Session { client, phase } => {
            let msg = match client {
                Client::Brightness => from_brightness,
                Client::Motion => from_motion,
            };
            let phase = match (msg, phase) {
                (Msg::Disconnect, _) => return Broker::Idle { last: client },
                (Msg::Publish { qos: 0, value }, _) => Phase::Forwarded(value),
                (Msg::Publish { qos: 1, value }, _) => Phase::Acked(value),
                (Msg::Publish { value, .. }, _) => Phase::Received(value),
                (Msg::PubRel, Phase::Received(v)) => Phase::Completed(v),
                _ => phase,
            };
            Broker::Session { client, phase }
        }
    }
}

/// Per-tick broker messages: (to brightness, to motion, to light).
fn broker_output(q: &Broker) -> (&'static str, &'static str, Option<(Client, u32)>) {
    let Broker::Session { client, phase } = *q else {
        return (NONE, NONE, None);
    };
    let (reply, forward) = match phase {
        Phase::Connected => ("ConnAck", None),
        Phase::Forwarded(v) => (NONE, Some(v)),
        Phase::Acked(v) => ("PubAck", Some(v)),
        Phase::Received(_) => ("PubRec", None),
        Phase::Completed(v) => ("PubComp", Some(v)),
    };
    let forward = forward.map(|v| (client, v));
    match client {
        Client::Brightness => (reply, NONE, forward),
        Client::Motion => (NONE, reply, forward),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Sensor {
    Idle,
    Connecting(u32),
    Publishing(u32),
    Releasing,
    Disconnecting,
}

/// A publisher that samples its environment input when idle and then runs
/// one session: connect, publish (with one or two handshakes), disconnect.
fn sensor(layout: &Layout, c: usize, client: Client) -> crate::moore::DetMoore {
    let ins = layout.input_alphabet(c).clone();
    let reply = ins.factors()[1].clone();
    let (conn_ack, pub_ack, pub_rec, pub_comp) = (
        sym(&reply, "ConnAck"),
        sym(&reply, "PubAck"),
        sym(&reply, "PubRec"),
        sym(&reply, "PubComp"),
    );
    let out = layout.output_alphabet(c).factors()[0].clone();
    let [a, b] = client.values();
    let qos = match client {
        Client::Brightness => 1,
        Client::Motion => 2,
    };
    let publish = [
        sym(&out, &format!("PubQoS{qos}({a})")),
        sym(&out, &format!("PubQoS{qos}({b})")),
    ];
    let (connect, rel, disconnect, none) = (
        sym(&out, "Connect"),
        sym(&out, "PubRel"),
        sym(&out, "Disconnect"),
        sym(&out, NONE),
    );
    component(
        layout,
        c,
        Sensor::Idle,
        |q| {
            vec![match q {
                Sensor::Idle => none,
                Sensor::Connecting(_) => connect,
                Sensor::Publishing(v) => publish[*v as usize],
                Sensor::Releasing => rel,
                Sensor::Disconnecting => disconnect,
            }]
        },
        |q, i| {
            let (env, r) = (i[0], i[1]);
            match *q {
                Sensor::Idle => Sensor::Connecting(env.0),
                Sensor::Connecting(v) if r == conn_ack => Sensor::Publishing(v),
                Sensor::Publishing(_) if qos == 1 && r == pub_ack => Sensor::Disconnecting,
                Sensor::Publishing(_) if qos == 2 && r == pub_rec => Sensor::Releasing,
                Sensor::Releasing if r == pub_comp => Sensor::Disconnecting,
                Sensor::Disconnecting => Sensor::Idle,
                q => q,
            }
        },
    )
}

/// Two sensors publish to a broker that forwards their readings to a
/// light. The broker serves either protocol variant for either sensor,
/// only talks to the connected sensor until it disconnects, and breaks
/// simultaneous connection attempts in favour of the sensor it did not
/// serve last. The light is on exactly when it is dark and there is motion.
pub fn mqtt_lighting() -> Mmn {
    let mut net = Network::new();
    let env_b = net.add_input("brightness_env");
    let env_m = net.add_input("motion_env");
    let s1 = net.add_component("brightness");
    let s2 = net.add_component("motion");
    let b = net.add_component("broker");
    let l = net.add_component("light");
    let out = net.add_output("lamp");
    let reply = names(&["ConnAck", "PubAck", "PubRec", "PubComp", NONE]);
    let status = names(&["bright", "dark", "motion", "no_motion", NONE]);
    net.add_edge(env_b, s1, names(&["bright", "dark"]));
    net.add_edge(env_m, s2, names(&["motion", "no_motion"]));
    net.add_edge(s1, b, publisher_alphabet(Client::Brightness));
    net.add_edge(b, s1, reply.clone());
    net.add_edge(s2, b, publisher_alphabet(Client::Motion));
    net.add_edge(b, s2, reply.clone());
    net.add_edge(b, l, status.clone());
    net.add_edge(l, out, names(&["ON", "OFF"]));
    let layout = Layout::new(&net).expect("lighting network is valid");

    let brightness = sensor(&layout, 0, Client::Brightness);
    let motion = sensor(&layout, 1, Client::Motion);

    let forward = |fw: Option<(Client, u32)>| match fw {
        None => sym(&status, NONE),
        Some((client, v)) => sym(&status, client.values()[v as usize]),
    };
    let broker = component(
        &layout,
        2,
        // the brightness sensor wins the first tie
        Broker::Idle {
            last: Client::Motion,
        },
        |q| {
            let (to_b, to_m, fw) = broker_output(q);
            vec![sym(&reply, to_b), sym(&reply, to_m), forward(fw)]
        },
        |q, i| broker_step(q, parse_msg(i[0]), parse_msg(i[1])),
    );

    // (dark, motion): initially dark without motion
    let light = component(
        &layout,
        3,
        (true, false),
        |&(dark, motion)| vec![Symbol(u32::from(!(dark && motion)))],
        |&(dark, motion), i| match i[0].0 {
            0 => (false, motion),
            1 => (true, motion),
            2 => (dark, true),
            3 => (dark, false),
            _ => (dark, motion),
        },
    );
    assemble(net, vec![brightness, motion, broker, light])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moore::Moore;

    #[test]
    fn component_sizes() {
        let m = mqtt_lighting();
        let sizes: Vec<usize> = m.components().iter().map(|c| c.num_states()).collect();
        assert_eq!(sizes[0], 6);
        assert_eq!(sizes[1], 7);
        assert_eq!(sizes[2], 20);
        assert_eq!(sizes[3], 4);
        assert!(m.components().iter().all(|c| c.is_complete()));
    }

    #[test]
    fn alphabets() {
        let m = mqtt_lighting();
        let e = m.network().edges();
        assert_eq!(e[2].alphabet.len(), 10);
        assert_eq!(e[3].alphabet.len(), 5);
        assert_eq!(e[4].alphabet.len(), 10);
        assert_eq!(m.inputs().cardinality(), 4);
        assert_eq!(m.outputs().cardinality(), 2);
    }

    #[test]
    fn light_starts_off_and_follows_motion_in_the_dark() {
        let m = mqtt_lighting();
        let off = m.outputs().parse_token("OFF").unwrap();
        let on = m.outputs().parse_token("ON").unwrap();
        assert_eq!(m.trace(&[])[0], off);
        let dark_motion = m.inputs().parse_token("dark,motion").unwrap();
        let w = vec![dark_motion; 20];
        assert!(m.trace(&w).contains(&on));
    }

    #[test]
    fn tie_goes_to_the_sensor_not_served_last() {
        let q = Broker::Idle {
            last: Client::Brightness,
        };
        let next = broker_step(&q, Msg::Connect, Msg::Connect);
        assert_eq!(
            next,
            Broker::Session {
                client: Client::Motion,
                phase: Phase::Connected
            }
        );
    }
}
