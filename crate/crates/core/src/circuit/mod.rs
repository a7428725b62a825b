//! Pauli-rotation gates, gate networks, and network transformations.
//!
//! A rotation about `sigma_b` by `t` is `exp(-i sigma_b t) = cos(t) I - i sin(t) sigma_b`.
//! Networks are ordered in time: the first gate in the list acts first, so the
//! dense form is `G_last ... G_2 G_1`. Each network also carries a global
//! phase, which only becomes observable once the network is conditioned on a
//! control qubit.

mod hamiltonian;
mod text;

pub use hamiltonian::{conditional_half_evolutions, trotter_error, trotterize, PauliSum};
pub use text::{parse_circuit, parse_hamiltonian, write_circuit, write_hamiltonian};

use rand::Rng;

use crate::dense::{check_dense, dim_of, Matrix, C64};
use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString};

#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    /// `exp(-i sigma_axis angle)`.
    PauliRotation { axis: PauliString, angle: f64 },
    /// `exp(-i sigma_axis angle)` on the branch where `control` reads `value`,
    /// identity on the other branch.
    ControlledPauliRotation {
        control: usize,
        value: bool,
        axis: PauliString,
        angle: f64,
    },
}

impl Gate {
    pub fn rotation(axis: PauliString, angle: f64) -> Result<Gate> {
        if axis.is_identity() {
            return Err(Error::IdentityPauli);
        }
        check_angle(angle)?;
        Ok(Gate::PauliRotation { axis, angle })
    }

    pub fn controlled(control: usize, value: bool, axis: PauliString, angle: f64) -> Result<Gate> {
        if axis.is_identity() {
            return Err(Error::IdentityPauli);
        }
        check_angle(angle)?;
        if control == 0 || control > axis.num_qubits() {
            return Err(Error::QubitIndex {
                index: control,
                n: axis.num_qubits(),
            });
        }
        if axis.acts_on(control) {
            return Err(Error::AxisTouchesControl(control));
        }
        Ok(Gate::ControlledPauliRotation {
            control,
            value,
            axis,
            angle,
        })
    }

    pub fn axis(&self) -> &PauliString {
        match self {
            Gate::PauliRotation { axis, .. } | Gate::ControlledPauliRotation { axis, .. } => axis,
        }
    }

    pub fn angle(&self) -> f64 {
        match self {
            Gate::PauliRotation { angle, .. } | Gate::ControlledPauliRotation { angle, .. } => {
                *angle
            }
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.axis().num_qubits()
    }

    pub fn inverse(&self) -> Gate {
        match self.clone() {
            Gate::PauliRotation { axis, angle } => Gate::PauliRotation {
                axis,
                angle: -angle,
            },
            Gate::ControlledPauliRotation {
                control,
                value,
                axis,
                angle,
            } => Gate::ControlledPauliRotation {
                control,
                value,
                axis,
                angle: -angle,
            },
        }
    }

    /// Applies the gate to a `2^n` amplitude vector in place.
    pub fn apply(&self, amps: &mut [C64]) {
        let n = self.num_qubits();
        let (xm, zm, ys) = self.axis().basis_masks();
        let (control_mask, control_on) = match self {
            Gate::PauliRotation { .. } => (0usize, 0usize),
            Gate::ControlledPauliRotation { control, value, .. } => {
                let bit = 1usize << (n - control);
                (bit, if *value { bit } else { 0 })
            }
        };
        let (s, c) = self.angle().sin_cos();
        let cos = C64::new(c, 0.0);
        // -i * sin * i^ys
        let base = C64::new(0.0, -s) * crate::pauli::Phase::from_exponent(ys as i64).to_complex();
        let coef = |k: usize| {
            // phase picked up by sigma mapping |k ^ x> to |k>
            if (zm & (k ^ xm)).count_ones() % 2 == 0 {
                base
            } else {
                -base
            }
        };
        if xm == 0 {
            for (k, a) in amps.iter_mut().enumerate() {
                if k & control_mask == control_on {
                    *a *= cos + coef(k);
                }
            }
            return;
        }
        let pivot = 1usize << (usize::BITS - 1 - xm.leading_zeros());
        for j in 0..amps.len() {
            if j & pivot != 0 || j & control_mask != control_on {
                continue;
            }
            let k = j ^ xm;
            let (a, b) = (amps[j], amps[k]);
            amps[j] = cos * a + coef(j) * b;
            amps[k] = cos * b + coef(k) * a;
        }
    }

    /// Dense unitary of this gate.
    pub fn unitary(&self) -> Result<Matrix> {
        let n = self.num_qubits();
        check_dense(n)?;
        let mut m = Matrix::identity(dim_of(n), dim_of(n));
        apply_left(std::slice::from_ref(self), &mut m);
        Ok(m)
    }
}

fn check_angle(angle: f64) -> Result<()> {
    if !angle.is_finite() {
        return Err(Error::InvalidArgument(format!("non-finite angle {angle}")));
    }
    Ok(())
}

pub fn gate_unitary(g: &Gate) -> Result<Matrix> {
    g.unitary()
}

/// Applies `gates` in time order to every column of `m`.
fn apply_left(gates: &[Gate], m: &mut Matrix) {
    for c in 0..m.ncols() {
        let col = m.column_mut(c);
        let slice = col.data.into_slice_mut();
        for g in gates {
            g.apply(slice);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct GateNetwork {
    n: usize,
    gates: Vec<Gate>,
    global_phase: f64,
}

impl GateNetwork {
    pub fn new(n: usize) -> Self {
        GateNetwork {
            n,
            gates: Vec::new(),
            global_phase: 0.0,
        }
    }

    pub fn from_gates(n: usize, gates: Vec<Gate>) -> Result<Self> {
        let mut net = Self::new(n);
        for g in gates {
            net.push(g)?;
        }
        Ok(net)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Global phase `phi` in `e^{i phi} G_last ... G_1`.
    pub fn global_phase(&self) -> f64 {
        self.global_phase
    }

    pub fn add_global_phase(&mut self, phi: f64) {
        self.global_phase += phi;
    }

    pub fn push(&mut self, g: Gate) -> Result<()> {
        if g.num_qubits() != self.n {
            return Err(Error::SizeMismatch {
                left: g.num_qubits(),
                right: self.n,
            });
        }
        self.gates.push(g);
        Ok(())
    }

    pub fn rotate(&mut self, axis: PauliString, angle: f64) -> Result<&mut Self> {
        self.push(Gate::rotation(axis, angle)?)?;
        Ok(self)
    }

    pub fn controlled_rotate(
        &mut self,
        control: usize,
        value: bool,
        axis: PauliString,
        angle: f64,
    ) -> Result<&mut Self> {
        self.push(Gate::controlled(control, value, axis, angle)?)?;
        Ok(self)
    }

    /// Appends `other` after `self` in time.
    pub fn append(&mut self, other: &GateNetwork) -> Result<()> {
        if other.n != self.n {
            return Err(Error::SizeMismatch {
                left: other.n,
                right: self.n,
            });
        }
        self.gates.extend(other.gates.iter().cloned());
        self.global_phase += other.global_phase;
        Ok(())
    }

    pub fn then(mut self, other: &GateNetwork) -> Result<Self> {
        self.append(other)?;
        Ok(self)
    }

    /// Reversed network with negated angles.
    pub fn inverse(&self) -> GateNetwork {
        GateNetwork {
            n: self.n,
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
            global_phase: -self.global_phase,
        }
    }

    /// This network repeated `k` times.
    pub fn power(&self, k: usize) -> GateNetwork {
        let mut out = GateNetwork::new(self.n);
        for _ in 0..k {
            out.gates.extend(self.gates.iter().cloned());
        }
        out.global_phase = self.global_phase * k as f64;
        out
    }

    /// Moves the network onto qubits `offset+1 ..= offset+n` of an `m`-qubit register.
    pub fn embed(&self, m: usize, offset: usize) -> Result<GateNetwork> {
        let mut out = GateNetwork::new(m);
        out.global_phase = self.global_phase;
        for g in &self.gates {
            let axis = g.axis().embed(m, offset)?;
            out.gates.push(match g {
                Gate::PauliRotation { angle, .. } => Gate::PauliRotation {
                    axis,
                    angle: *angle,
                },
                Gate::ControlledPauliRotation {
                    control,
                    value,
                    angle,
                    ..
                } => Gate::ControlledPauliRotation {
                    control: control + offset,
                    value: *value,
                    axis,
                    angle: *angle,
                },
            });
        }
        Ok(out)
    }

    /// Applies the network to a state vector in place.
    pub fn apply(&self, amps: &mut [C64]) {
        for g in &self.gates {
            g.apply(amps);
        }
        if self.global_phase != 0.0 {
            let ph = C64::from_polar(1.0, self.global_phase);
            amps.iter_mut().for_each(|a| *a *= ph);
        }
    }

    /// Replaces `m` with `U m`.
    pub fn apply_left(&self, m: &mut Matrix) {
        apply_left(&self.gates, m);
        if self.global_phase != 0.0 {
            *m *= C64::from_polar(1.0, self.global_phase);
        }
    }

    /// Dense unitary.
    pub fn unitary(&self) -> Result<Matrix> {
        check_dense(self.n)?;
        let dim = dim_of(self.n);
        let mut m = Matrix::identity(dim, dim);
        self.apply_left(&mut m);
        Ok(m)
    }

    /// Random network of `len` rotations with axes of weight 1 or 2 and uniform angles.
    pub fn random<R: Rng + ?Sized>(n: usize, len: usize, rng: &mut R) -> GateNetwork {
        let mut net = GateNetwork::new(n);
        for _ in 0..len {
            let axis = random_local_axis(n, 2, rng);
            let angle = rng.random_range(0.0..std::f64::consts::TAU);
            net.gates.push(Gate::PauliRotation { axis, angle });
        }
        net
    }
}

/// Random non-identity Pauli string supported on at most `max_weight` qubits.
pub fn random_local_axis<R: Rng + ?Sized>(n: usize, max_weight: usize, rng: &mut R) -> PauliString {
    let weight = rng.random_range(1..=max_weight.min(n).max(1));
    let mut qubits: Vec<usize> = (1..=n).collect();
    for i in 0..weight {
        let j = rng.random_range(i..n);
        qubits.swap(i, j);
    }
    let mut s = PauliString::identity(n);
    for &q in &qubits[..weight] {
        let op = match rng.random_range(0..3) {
            0 => Pauli::X,
            1 => Pauli::Y,
            _ => Pauli::Z,
        };
        s.set(q, op).expect("qubit in range");
    }
    s
}

pub fn network_unitary(net: &GateNetwork) -> Result<Matrix> {
    net.unitary()
}

/// Controlled version of `net` on `n + 1` qubits: qubit 1 is the control and
/// `net` runs on qubits `2..=n+1` when the control reads `control_value`.
///
/// Each rotation becomes one controlled rotation and each controlled rotation
/// becomes two, using `exp(-i t s P_c) = exp(-i t s / 2) exp(-i t s Z_c (+/-) / 2)`
/// for the projector `P_c` onto the inner control value. The global phase of
/// `net` turns into a `Z` rotation on the control.
pub fn conditional_u(net: &GateNetwork, control_value: bool) -> GateNetwork {
    let m = net.n + 1;
    let mut out = GateNetwork::new(m);
    for g in &net.gates {
        let axis = g.axis().embed(m, 1).expect("one extra qubit always fits");
        match g {
            Gate::PauliRotation { angle, .. } => {
                out.gates.push(Gate::ControlledPauliRotation {
                    control: 1,
                    value: control_value,
                    axis,
                    angle: *angle,
                });
            }
            Gate::ControlledPauliRotation {
                control,
                value,
                angle,
                ..
            } => {
                let inner = control + 1;
                let sign = if *value { -1.0 } else { 1.0 };
                let with_z = axis
                    .clone()
                    .with(inner, Pauli::Z)
                    .expect("inner control in range");
                out.gates.push(Gate::ControlledPauliRotation {
                    control: 1,
                    value: control_value,
                    axis,
                    angle: angle / 2.0,
                });
                out.gates.push(Gate::ControlledPauliRotation {
                    control: 1,
                    value: control_value,
                    axis: with_z,
                    angle: sign * angle / 2.0,
                });
            }
        }
    }
    push_branch_phase(&mut out, 1, control_value, net.global_phase);
    out
}

/// Appends `e^{i phi}` on the branch where `qubit` reads `value`.
fn push_branch_phase(net: &mut GateNetwork, qubit: usize, value: bool, phi: f64) {
    if phi == 0.0 {
        return;
    }
    let sign = if value { -1.0 } else { 1.0 };
    let z = PauliString::single(net.n, qubit, Pauli::Z).expect("qubit in range");
    net.gates.push(Gate::PauliRotation {
        axis: z,
        angle: -sign * phi / 2.0,
    });
    net.global_phase += phi / 2.0;
}

/// SWAP of two qubits as `e^{i pi/4} exp(-i pi/4 XX) exp(-i pi/4 YY) exp(-i pi/4 ZZ)`.
pub fn swap(n: usize, a: usize, b: usize) -> Result<GateNetwork> {
    if a == b {
        return Err(Error::InvalidArgument("swap of a qubit with itself".into()));
    }
    let mut net = GateNetwork::new(n);
    for op in [Pauli::X, Pauli::Y, Pauli::Z] {
        let axis = PauliString::from_sparse(n, &[(a, op), (b, op)])?;
        net.rotate(axis, std::f64::consts::FRAC_PI_4)?;
    }
    net.global_phase = std::f64::consts::FRAC_PI_4;
    Ok(net)
}

/// Bit flip on `qubit` as `e^{i pi/2} exp(-i pi/2 X)`.
pub fn not_gate(n: usize, qubit: usize) -> Result<GateNetwork> {
    let mut net = GateNetwork::new(n);
    net.rotate(
        PauliString::single(n, qubit, Pauli::X)?,
        std::f64::consts::FRAC_PI_2,
    )?;
    net.global_phase = std::f64::consts::FRAC_PI_2;
    Ok(net)
}

/// The zero-controlled NOT on `n + 1` qubits: qubit 1 is flipped exactly when
/// qubits `2..=n+1` are all zero.
///
/// Writing the flip as `exp(-i pi/2 (X_1 - I) P)` with `P` the projector onto
/// the all-zero control pattern, and expanding `P` over the controls other
/// than qubit 2 into `Z` strings, gives `2^n` mutually commuting rotations
/// each conditioned on qubit 2 reading zero.
pub fn build_tn(n: usize) -> Result<GateNetwork> {
    if n == 0 {
        return Err(Error::QubitRange(n));
    }
    if n > 30 {
        return Err(Error::InvalidArgument(format!(
            "T_n with {n} controls is too large"
        )));
    }
    let m = n + 1;
    let theta = std::f64::consts::PI / (1u64 << n) as f64;
    let mut net = GateNetwork::new(m);
    let rest = n - 1;
    for subset in 0u64..(1u64 << rest) {
        let mut z = PauliString::identity(m);
        for k in 0..rest {
            if subset >> k & 1 == 1 {
                z.set(3 + k, Pauli::Z)?;
            }
        }
        let xz = z.clone().with(1, Pauli::X)?;
        net.controlled_rotate(2, false, xz, theta)?;
        if subset != 0 {
            net.controlled_rotate(2, false, z, -theta)?;
        }
    }
    push_branch_phase(&mut net, 2, false, theta);
    Ok(net)
}
