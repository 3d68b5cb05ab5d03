//! Leaf-spine fabric: node/port layout, per-packet sprayed routing, and
//! propagation-delay calibration against a target unloaded round-trip time.
//!
//! Hosts hang off leaf switches; every leaf connects to every spine. Links are
//! full duplex and modeled as two directed ports. Host NICs are plain FIFO
//! egress queues; every switch-owned egress port runs the MLFQ scheduler.

use crate::engine::SimTime;
use rand::Rng;

/// Payload bytes carried by a full-size data packet.
pub const MSS_PAYLOAD: u64 = 1460;
/// Header overhead added to every data packet on the wire.
pub const HEADER_BYTES: u64 = 40;
/// On-wire size of a full-size data packet (1460 payload + 40 header).
pub const DATA_WIRE_BYTES: u64 = MSS_PAYLOAD + HEADER_BYTES;
/// On-wire size of a bare ACK.
pub const ACK_WIRE_BYTES: u64 = 40;

/// One packet in flight. ACKs reuse `seq_no` for the cumulative ack offset.
#[derive(Clone, Copy, Debug)]
pub struct Packet {
    pub flow_id: u64,
    pub src: u32,
    pub dst: u32,
    /// Byte offset of the first payload byte (data) or cumulative ack (ACK).
    pub seq_no: u64,
    pub payload: u32,
    pub is_ack: bool,
    /// Congestion-experienced mark set by a switch port on enqueue.
    pub ecn_ce: bool,
    /// On ACKs: echoes the CE bit of the data packet being acknowledged.
    pub ecn_echo: bool,
    /// Set on the data packet carrying the flow's final byte.
    pub flow_end_mark: bool,
    /// Total flow size in bytes; only meaningful when `flow_end_mark` is set.
    pub final_size: u64,
}

impl Packet {
    pub fn wire_bytes(&self) -> u64 {
        if self.is_ack {
            ACK_WIRE_BYTES
        } else {
            self.payload as u64 + HEADER_BYTES
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Node {
    Host(u32),
    Leaf(u32),
    Spine(u32),
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PortKind {
    HostNic,
    SwitchPort,
}

/// A directed egress port: the sending end of one directed link.
#[derive(Clone, Debug)]
pub struct PortDesc {
    pub from: Node,
    pub to: Node,
    pub bps: u64,
    pub prop_delay: SimTime,
    pub kind: PortKind,
    /// Owning device, e.g. "leaf3" or "host17"; used in trajectory output.
    pub switch_label: String,
    /// Port within the device, e.g. "down5", "up1", "nic".
    pub port_label: String,
}

#[derive(Clone, Debug)]
pub struct TopologyConfig {
    pub leaf_count: u32,
    pub spine_count: u32,
    pub hosts_per_leaf: u32,
    pub downlink_bps: u64,
    pub uplink_bps: u64,
    /// Per-link propagation delay, identical on every link (see `calibrate_prop_delay`).
    pub prop_delay: SimTime,
}

#[derive(Debug, thiserror::Error)]
pub enum TopologyError {
    #[error("topology counts must be nonzero (leaves {leaves}, spines {spines}, hosts/leaf {hosts_per_leaf})")]
    ZeroCount {
        leaves: u32,
        spines: u32,
        hosts_per_leaf: u32,
    },
    #[error("need at least two hosts, got {0}")]
    TooFewHosts(u32),
    #[error("link rates must be nonzero")]
    ZeroRate,
}

#[derive(Debug, thiserror::Error)]
#[error("target RTT {target} is infeasible: serialization alone takes {serialization}")]
pub struct CalibrationError {
    pub target: SimTime,
    pub serialization: SimTime,
}

/// Serialization time of `wire_bytes` on a `bps` link, rounded to nearest ns.
pub fn ser_time(wire_bytes: u64, bps: u64) -> SimTime {
    let num = wire_bytes as u128 * 8 * 1_000_000_000;
    SimTime(((num + bps as u128 / 2) / bps as u128) as u64)
}

/// Unloaded four-hop round trip of one full data packet plus its ACK: four
/// store-and-forward serializations each way plus eight propagation delays.
pub fn four_hop_rtt(downlink_bps: u64, uplink_bps: u64, prop_delay: SimTime) -> SimTime {
    let mut total = SimTime::ZERO;
    for bytes in [DATA_WIRE_BYTES, ACK_WIRE_BYTES] {
        total = total + ser_time(bytes, downlink_bps) + ser_time(bytes, downlink_bps);
        total = total + ser_time(bytes, uplink_bps) + ser_time(bytes, uplink_bps);
    }
    SimTime(total.as_nanos() + 8 * prop_delay.as_nanos())
}

/// Solves for the per-link propagation delay that makes the unloaded four-hop
/// RTT (MSS data + minimum ACK, across the spine) meet `target_rtt`.
pub fn calibrate_prop_delay(
    downlink_bps: u64,
    uplink_bps: u64,
    target_rtt: SimTime,
) -> Result<SimTime, CalibrationError> {
    let ser = four_hop_rtt(downlink_bps, uplink_bps, SimTime::ZERO);
    if ser > target_rtt {
        return Err(CalibrationError {
            target: target_rtt,
            serialization: ser,
        });
    }
    Ok(SimTime((target_rtt.as_nanos() - ser.as_nanos()) / 8))
}

pub struct Topology {
    pub cfg: TopologyConfig,
    pub ports: Vec<PortDesc>,
    /// Port ids owned by switches (the MLFQ ports), in a fixed deterministic order.
    pub switch_ports: Vec<usize>,
    nic_port: Vec<usize>,
    leaf_down: Vec<Vec<usize>>,
    leaf_up: Vec<Vec<usize>>,
    spine_down: Vec<Vec<usize>>,
}

impl Topology {
    pub fn build(cfg: TopologyConfig) -> Result<Topology, TopologyError> {
        if cfg.leaf_count == 0 || cfg.spine_count == 0 || cfg.hosts_per_leaf == 0 {
            return Err(TopologyError::ZeroCount {
                leaves: cfg.leaf_count,
                spines: cfg.spine_count,
                hosts_per_leaf: cfg.hosts_per_leaf,
            });
        }
        if cfg.downlink_bps == 0 || cfg.uplink_bps == 0 {
            return Err(TopologyError::ZeroRate);
        }
        let hosts = cfg.leaf_count * cfg.hosts_per_leaf;
        if hosts < 2 {
            return Err(TopologyError::TooFewHosts(hosts));
        }

        let mut ports = Vec::new();
        let mut push = |desc: PortDesc| -> usize {
            ports.push(desc);
            ports.len() - 1
        };

        // Host NICs first, one per host, id == host id.
        let mut nic_port = Vec::with_capacity(hosts as usize);
        for h in 0..hosts {
            let leaf = h / cfg.hosts_per_leaf;
            nic_port.push(push(PortDesc {
                from: Node::Host(h),
                to: Node::Leaf(leaf),
                bps: cfg.downlink_bps,
                prop_delay: cfg.prop_delay,
                kind: PortKind::HostNic,
                switch_label: format!("host{h}"),
                port_label: "nic".to_string(),
            }));
        }

        // Leaf ports: downlinks to local hosts, then uplinks to every spine.
        let mut leaf_down = Vec::new();
        let mut leaf_up = Vec::new();
        for l in 0..cfg.leaf_count {
            let mut down = Vec::new();
            for i in 0..cfg.hosts_per_leaf {
                let host = l * cfg.hosts_per_leaf + i;
                down.push(push(PortDesc {
                    from: Node::Leaf(l),
                    to: Node::Host(host),
                    bps: cfg.downlink_bps,
                    prop_delay: cfg.prop_delay,
                    kind: PortKind::SwitchPort,
                    switch_label: format!("leaf{l}"),
                    port_label: format!("down{i}"),
                }));
            }
            leaf_down.push(down);
            let mut up = Vec::new();
            for s in 0..cfg.spine_count {
                up.push(push(PortDesc {
                    from: Node::Leaf(l),
                    to: Node::Spine(s),
                    bps: cfg.uplink_bps,
                    prop_delay: cfg.prop_delay,
                    kind: PortKind::SwitchPort,
                    switch_label: format!("leaf{l}"),
                    port_label: format!("up{s}"),
                }));
            }
            leaf_up.push(up);
        }

        // Spine ports: one downlink per leaf.
        let mut spine_down = Vec::new();
        for s in 0..cfg.spine_count {
            let mut down = Vec::new();
            for l in 0..cfg.leaf_count {
                down.push(push(PortDesc {
                    from: Node::Spine(s),
                    to: Node::Leaf(l),
                    bps: cfg.uplink_bps,
                    prop_delay: cfg.prop_delay,
                    kind: PortKind::SwitchPort,
                    switch_label: format!("spine{s}"),
                    port_label: format!("down{l}"),
                }));
            }
            spine_down.push(down);
        }

        let switch_ports = ports
            .iter()
            .enumerate()
            .filter(|(_, p)| p.kind == PortKind::SwitchPort)
            .map(|(i, _)| i)
            .collect();

        Ok(Topology {
            cfg,
            ports,
            switch_ports,
            nic_port,
            leaf_down,
            leaf_up,
            spine_down,
        })
    }

    pub fn host_count(&self) -> u32 {
        self.cfg.leaf_count * self.cfg.hosts_per_leaf
    }

    pub fn leaf_of(&self, host: u32) -> u32 {
        host / self.cfg.hosts_per_leaf
    }

    pub fn nic_port(&self, host: u32) -> usize {
        self.nic_port[host as usize]
    }

    /// Leaf downlink port id that faces `host` (where that host's inbound
    /// traffic queues).
    pub fn downlink_to_host(&self, host: u32) -> usize {
        let leaf = self.leaf_of(host) as usize;
        self.leaf_down[leaf][(host % self.cfg.hosts_per_leaf) as usize]
    }

    /// Next egress port for a packet sitting at `at` and destined to host
    /// `dst`. Leaf-to-spine hops are sprayed: a uniform-random uplink per
    /// packet. Intra-leaf traffic never touches a spine.
    pub fn route_next_hop<R: Rng>(&self, at: Node, dst: u32, rng: &mut R) -> usize {
        debug_assert!(dst < self.host_count(), "unreachable destination {dst}");
        match at {
            Node::Host(h) => self.nic_port[h as usize],
            Node::Leaf(l) => {
                if self.leaf_of(dst) == l {
                    self.leaf_down[l as usize][(dst % self.cfg.hosts_per_leaf) as usize]
                } else {
                    let s = rng.gen_range(0..self.cfg.spine_count) as usize;
                    self.leaf_up[l as usize][s]
                }
            }
            Node::Spine(s) => self.spine_down[s as usize][self.leaf_of(dst) as usize],
        }
    }
}
