//! DH-parameterized serial chain, forward kinematics, and the geometric
//! Jacobian for the six-axis master manipulator.
//!
//! Convention: standard (distal) Denavit-Hartenberg. The transform of link j
//! at joint angle theta is
//!
//! ```text
//! A_j = RotZ(theta + theta_offset_j) * TransZ(d_j) * TransX(a_j) * RotX(alpha_j)
//! ```
//!
//! and the chain pose is `base_pose * A_1 * ... * A_6`. All joints are
//! revolute; joint j rotates about the z-axis of frame j-1.

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::rng::SampleStream;

/// Number of joints of the modelled manipulator. Chains of any other length
/// are rejected at construction.
pub const NUM_JOINTS: usize = 6;

/// One DH link: fixed geometry plus the joint's travel limits.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DhLink {
    /// Twist about the link x-axis (radians).
    pub alpha: f64,
    /// Link length along x (meters, nonnegative).
    pub a: f64,
    /// Offset along z (meters).
    pub d: f64,
    /// Constant added to the joint variable (radians).
    pub theta_offset: f64,
    /// Lower joint limit (radians).
    pub theta_down: f64,
    /// Upper joint limit (radians).
    pub theta_up: f64,
}

impl DhLink {
    pub fn validate(&self) -> Result<()> {
        if !self.theta_down.is_finite() || !self.theta_up.is_finite() {
            return Err(Error::InvalidInput("joint limits must be finite".into()));
        }
        if self.theta_down > self.theta_up {
            return Err(Error::InvalidInput(format!(
                "theta_down ({}) must not exceed theta_up ({})",
                self.theta_down, self.theta_up
            )));
        }
        if !(self.a >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "link length a must be nonnegative, got {}",
                self.a
            )));
        }
        Ok(())
    }
}

/// Rigid pose: position plus a proper rotation matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pose {
    pub position: Vector3<f64>,
    pub orientation: Matrix3<f64>,
}

impl Pose {
    pub fn identity() -> Self {
        Pose {
            position: Vector3::zeros(),
            orientation: Matrix3::identity(),
        }
    }

    /// `self` then `other`, i.e. the frame of `other` expressed through `self`.
    pub fn compose(&self, other: &Pose) -> Pose {
        Pose {
            position: self.position + self.orientation * other.position,
            orientation: self.orientation * other.orientation,
        }
    }

    /// Max-abs entry of `R^T R - I`; zero for a perfectly orthonormal matrix.
    pub fn orthonormality_residual(&self) -> f64 {
        let r = self.orientation.transpose() * self.orientation - Matrix3::identity();
        r.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// A joint configuration of the six-axis chain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JointVector(pub [f64; NUM_JOINTS]);

impl JointVector {
    pub fn zeros() -> Self {
        JointVector([0.0; NUM_JOINTS])
    }
}

/// Six-link DH chain with a base pose.
#[derive(Clone, Debug, PartialEq)]
pub struct ManipulatorModel {
    links: [DhLink; NUM_JOINTS],
    pub base_pose: Pose,
}

impl ManipulatorModel {
    pub fn new(links: Vec<DhLink>, base_pose: Pose) -> Result<Self> {
        let links: [DhLink; NUM_JOINTS] = links.try_into().map_err(|v: Vec<DhLink>| {
            Error::InvalidInput(format!("expected {} links, got {}", NUM_JOINTS, v.len()))
        })?;
        for (i, link) in links.iter().enumerate() {
            link.validate()
                .map_err(|e| Error::InvalidInput(format!("link {}: {e}", i + 1)))?;
        }
        Ok(ManipulatorModel { links, base_pose })
    }

    pub fn links(&self) -> &[DhLink; NUM_JOINTS] {
        &self.links
    }

    /// Copy with the lengths of links 3 and 4 replaced; used by the design
    /// optimizer, which varies exactly those two.
    pub fn with_link_lengths(&self, a3: f64, a4: f64) -> Result<Self> {
        let mut links = self.links;
        links[2].a = a3;
        links[3].a = a4;
        ManipulatorModel::new(links.to_vec(), self.base_pose)
    }

    /// Sum of all translational magnitudes: every reachable point lies within
    /// this radius of the base origin.
    pub fn reach_bound(&self) -> f64 {
        self.links.iter().map(|l| l.a.abs() + l.d.abs()).sum()
    }
}

fn link_transform(link: &DhLink, theta: f64) -> Pose {
    let t = theta + link.theta_offset;
    let (st, ct) = t.sin_cos();
    let (sa, ca) = link.alpha.sin_cos();
    Pose {
        position: Vector3::new(link.a * ct, link.a * st, link.d),
        orientation: Matrix3::new(
            ct, -st * ca, st * sa, //
            st, ct * ca, -ct * sa, //
            0.0, sa, ca,
        ),
    }
}

/// Poses of every chain frame: index 0 is the base, index j the frame after
/// link j. The end-effector is the last entry.
pub fn frame_poses(model: &ManipulatorModel, q: &JointVector) -> [Pose; NUM_JOINTS + 1] {
    let mut frames = [model.base_pose; NUM_JOINTS + 1];
    for (j, link) in model.links.iter().enumerate() {
        frames[j + 1] = frames[j].compose(&link_transform(link, q.0[j]));
    }
    frames
}

/// End-effector pose of the chain at configuration `q`.
pub fn forward_kinematics(model: &ManipulatorModel, q: &JointVector) -> Pose {
    frame_poses(model, q)[NUM_JOINTS]
}

/// Geometric Jacobian at `q`, 6x6: rows 1-3 map joint rates to end-effector
/// linear velocity, rows 4-6 to angular velocity, both in the base frame.
/// Column j is `[z_{j-1} x (p_e - p_{j-1}); z_{j-1}]`.
pub fn geometric_jacobian(model: &ManipulatorModel, q: &JointVector) -> nalgebra::Matrix6<f64> {
    let frames = frame_poses(model, q);
    let p_e = frames[NUM_JOINTS].position;
    let mut jac = nalgebra::Matrix6::zeros();
    for j in 0..NUM_JOINTS {
        let z = frames[j].orientation.column(2).into_owned();
        let p = frames[j].position;
        let linear = z.cross(&(p_e - p));
        for r in 0..3 {
            jac[(r, j)] = linear[r];
            jac[(r + 3, j)] = z[r];
        }
    }
    jac
}

/// Draw one configuration uniformly inside the joint limits. A joint with a
/// degenerate interval always returns its pinned value.
pub fn sample_joint_config(model: &ManipulatorModel, stream: &mut SampleStream) -> JointVector {
    let mut theta = [0.0; NUM_JOINTS];
    for (j, link) in model.links.iter().enumerate() {
        theta[j] = stream.uniform(link.theta_down, link.theta_up);
    }
    JointVector(theta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::domain;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, PI};

    use crate::testutil::console_arm;

    fn link(alpha: f64, a: f64) -> DhLink {
        DhLink {
            alpha,
            a,
            d: 0.0,
            theta_offset: 0.0,
            theta_down: -FRAC_PI_2,
            theta_up: FRAC_PI_2,
        }
    }

    #[test]
    fn rejects_wrong_link_count() {
        let links = vec![link(0.0, 0.1); 5];
        assert!(matches!(
            ManipulatorModel::new(links, Pose::identity()),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn rejects_inverted_limits() {
        let mut l = link(0.0, 0.1);
        l.theta_down = 1.0;
        l.theta_up = -1.0;
        assert!(l.validate().is_err());
    }

    #[test]
    fn zero_configuration_accumulates_link_lengths_along_x() {
        let pose = forward_kinematics(&console_arm(0.26, 0.18), &JointVector::zeros());
        assert_abs_diff_eq!(pose.position.x, 0.44, epsilon = 1e-15);
        assert_abs_diff_eq!(pose.position.y, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(pose.position.z, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn zero_geometry_chain_stays_at_origin() {
        let model = console_arm(0.0, 0.0);
        let pose = forward_kinematics(&model, &JointVector::zeros());
        assert_eq!(pose.position, Vector3::zeros());
        // Orientation is the product of the fixed RotX(alpha_j) factors.
        let mut expect = Matrix3::identity();
        for l in model.links() {
            let (sa, ca) = l.alpha.sin_cos();
            expect *= Matrix3::new(1.0, 0.0, 0.0, 0.0, ca, -sa, 0.0, sa, ca);
        }
        assert!((pose.orientation - expect).abs().max() < 1e-15);
    }

    #[test]
    fn orientation_stays_orthonormal() {
        let model = console_arm(0.26, 0.18);
        for i in 0..200 {
            let mut s = SampleStream::new(5, domain::ROBOT, i);
            let q = sample_joint_config(&model, &mut s);
            let pose = forward_kinematics(&model, &q);
            assert!(pose.orthonormality_residual() < 1e-9);
            let det = pose.orientation.determinant();
            assert!((det - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn fk_invariant_under_full_turn() {
        let model = console_arm(0.26, 0.18);
        for i in 0..50 {
            let mut s = SampleStream::new(11, domain::ROBOT, i);
            let q = sample_joint_config(&model, &mut s);
            let base = forward_kinematics(&model, &q);
            for j in 0..NUM_JOINTS {
                let mut shifted = q;
                shifted.0[j] += 2.0 * PI;
                let pose = forward_kinematics(&model, &shifted);
                assert!((pose.position - base.position).norm() < 1e-12);
                assert!((pose.orientation - base.orientation).abs().max() < 1e-12);
            }
        }
    }

    #[test]
    fn wrist_columns_have_zero_linear_part() {
        let model = console_arm(0.26, 0.18);
        for i in 0..50 {
            let mut s = SampleStream::new(17, domain::ROBOT, i);
            let q = sample_joint_config(&model, &mut s);
            let jac = geometric_jacobian(&model, &q);
            for col in [4, 5] {
                for r in 0..3 {
                    assert_abs_diff_eq!(jac[(r, col)], 0.0, epsilon = 1e-14);
                }
            }
        }
    }

    #[test]
    fn angular_columns_are_unit_joint_axes() {
        let model = console_arm(0.26, 0.18);
        let mut s = SampleStream::new(23, domain::ROBOT, 0);
        let q = sample_joint_config(&model, &mut s);
        let jac = geometric_jacobian(&model, &q);
        let frames = frame_poses(&model, &q);
        for j in 0..NUM_JOINTS {
            let z = frames[j].orientation.column(2);
            let ang = Vector3::new(jac[(3, j)], jac[(4, j)], jac[(5, j)]);
            assert!((ang - z).norm() < 1e-14);
            assert_abs_diff_eq!(ang.norm(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn jacobian_linear_block_matches_finite_differences() {
        let model = console_arm(0.26, 0.18);
        let h = 1e-6;
        for i in 0..100 {
            let mut s = SampleStream::new(29, domain::ROBOT, i);
            let q = sample_joint_config(&model, &mut s);
            let jac = geometric_jacobian(&model, &q);
            for j in 0..NUM_JOINTS {
                let mut hi = q;
                let mut lo = q;
                hi.0[j] += h;
                lo.0[j] -= h;
                let dp = (forward_kinematics(&model, &hi).position
                    - forward_kinematics(&model, &lo).position)
                    / (2.0 * h);
                for r in 0..3 {
                    assert!((jac[(r, j)] - dp[r]).abs() < 1e-6);
                }
            }
        }
    }

    #[test]
    fn degenerate_limits_sample_the_pinned_value() {
        let mut links = console_arm(0.1, 0.1).links().to_vec();
        for l in &mut links {
            l.theta_down = 0.0;
            l.theta_up = 0.0;
        }
        let model = ManipulatorModel::new(links, Pose::identity()).unwrap();
        for i in 0..20 {
            let mut s = SampleStream::new(31, domain::ROBOT, i);
            assert_eq!(sample_joint_config(&model, &mut s), JointVector::zeros());
        }
    }

    #[test]
    fn sampling_respects_limits_and_mean() {
        let model = console_arm(0.2, 0.2);
        let n = 100_000u64;
        let mut sums = [0.0f64; NUM_JOINTS];
        for i in 0..n {
            let mut s = SampleStream::new(37, domain::ROBOT, i);
            let q = sample_joint_config(&model, &mut s);
            for j in 0..NUM_JOINTS {
                assert!(q.0[j] >= model.links()[j].theta_down);
                assert!(q.0[j] <= model.links()[j].theta_up);
                sums[j] += q.0[j];
            }
        }
        for sum in sums {
            assert!((sum / n as f64).abs() < 0.02);
        }
    }

    #[test]
    fn zero_link_lengths_collapse_positions_to_base() {
        let model = console_arm(0.0, 0.0);
        for i in 0..100 {
            let mut s = SampleStream::new(41, domain::ROBOT, i);
            let q = sample_joint_config(&model, &mut s);
            assert!(forward_kinematics(&model, &q).position.norm() < 1e-15);
        }
    }
}
