//! Fixed registry of relation anchors attached to every check record.

use serde::{Serialize, Serializer};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Anchor {
    Jacobi,
    Subalgebra,
    MassCentral,
    SpinCasimirCentral,
    GalileiCasimirCentral,
    Centrality,
    TimeTranslationNotCentral,
    Homomorphism,
    TruncatedCcr,
    MassScalar,
    ZetaCcr,
    BoostShift,
    RotationCovariance,
    SpinCasimir,
    InternalTensor,
    MassAdditivity,
    ComCcr,
    NaiveCcr,
    RelativeCcr,
    CrossCcr,
    Symplectic,
    RelativeSpectrum,
    SpinAddition,
    Unitarity,
    EnergyConservation,
    PictureEquivalence,
    FlowDichotomy,
    GalileiPhase,
    ExtraCasimir,
    Ehrenfest,
    ComDecoupling,
    RotationInvariance,
    SpinConservation,
    TruncationGuard,
}

impl Anchor {
    pub const ALL: [Anchor; 34] = [
        Anchor::Jacobi,
        Anchor::Subalgebra,
        Anchor::MassCentral,
        Anchor::SpinCasimirCentral,
        Anchor::GalileiCasimirCentral,
        Anchor::Centrality,
        Anchor::TimeTranslationNotCentral,
        Anchor::Homomorphism,
        Anchor::TruncatedCcr,
        Anchor::MassScalar,
        Anchor::ZetaCcr,
        Anchor::BoostShift,
        Anchor::RotationCovariance,
        Anchor::SpinCasimir,
        Anchor::InternalTensor,
        Anchor::MassAdditivity,
        Anchor::ComCcr,
        Anchor::NaiveCcr,
        Anchor::RelativeCcr,
        Anchor::CrossCcr,
        Anchor::Symplectic,
        Anchor::RelativeSpectrum,
        Anchor::SpinAddition,
        Anchor::Unitarity,
        Anchor::EnergyConservation,
        Anchor::PictureEquivalence,
        Anchor::FlowDichotomy,
        Anchor::GalileiPhase,
        Anchor::ExtraCasimir,
        Anchor::Ehrenfest,
        Anchor::ComDecoupling,
        Anchor::RotationInvariance,
        Anchor::SpinConservation,
        Anchor::TruncationGuard,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Anchor::Jacobi => "[[A,B],C] + [[B,C],A] + [[C,A],B] = 0",
            Anchor::Subalgebra => "span of the subset closed under [ , ]",
            Anchor::MassCentral => "[M, G] = 0",
            Anchor::SpinCasimirCentral => "(1/2) T_ij T^ij, T_ij = M J_ij - (K_i P_j - K_j P_i)",
            Anchor::GalileiCasimirCentral => "2MH - P_i P^i",
            Anchor::Centrality => "[C, G_a] = 0 for every generator G_a",
            Anchor::TimeTranslationNotCentral => "[K_i, H] = iħ P_i",
            Anchor::Homomorphism => "[Ĝ_a, Ĝ_b] = iħ f^c_ab Ĝ_c",
            Anchor::TruncatedCcr => "[X̂, P̂] = iħ(Id - N|N-1⟩⟨N-1|)",
            Anchor::MassScalar => "M̂ = m Id",
            Anchor::ZetaCcr => "[X̂_ζ, P̂_ζ] = iħζ",
            Anchor::BoostShift => "e^{-ib·K/ħ} P e^{ib·K/ħ} = P + m b",
            Anchor::RotationCovariance => "e^{iθJ_12/ħ} K_1 e^{-iθJ_12/ħ} = cosθ K_1 - sinθ K_2",
            Anchor::SpinCasimir => "(1/2) Ŝ_ij Ŝ^ij = s(s+1)ħ² Id",
            Anchor::InternalTensor => "T̂_ij = m Ŝ_ij",
            Anchor::MassAdditivity => "M̂ = (m_a + m_b) Id",
            Anchor::ComCcr => "X̂_i = K̂_i / m, [X̂_i, P̂_j] = iħ δ_ij",
            Anchor::NaiveCcr => "[X̂_a + X̂_b, P̂_a + P̂_b] = 2iħ",
            Anchor::RelativeCcr => "[R̂_i, Q̂_j] = iħ δ_ij",
            Anchor::CrossCcr => "[R̂, P̂] = [Q̂, X̂] = [R̂, X̂] = [Q̂, P̂] = 0",
            Anchor::Symplectic => "(X_a, X_b, P_a, P_b) → (X, R, P, Q) is canonical",
            Anchor::RelativeSpectrum => "Ŝ_ij = R̂_i Q̂_j - R̂_j Q̂_i + Ŝ^a_ij + Ŝ^b_ij, (1/2) Ŝ_ij Ŝ^ij = ℓ(ℓ+1)ħ²",
            Anchor::SpinAddition => "s_a ⊗ s_b = ⊕ s, |s_a - s_b| ≤ s ≤ s_a + s_b",
            Anchor::Unitarity => "|φ(t)⟩ = e^{tĤ/iħ} |φ(0)⟩",
            Anchor::EnergyConservation => "d⟨Ĥ⟩/dt = 0",
            Anchor::PictureEquivalence => "⟨φ(t)|Â|φ(t)⟩ = ⟨φ|e^{iĤt/ħ} Â e^{-iĤt/ħ}|φ⟩",
            Anchor::FlowDichotomy => "Ĥ = P̂²/2m + 𝒱 vs Ĥ_phys = P̂²/2m + V(X̂)",
            Anchor::GalileiPhase => "Ĥ - Ĥ_phys = 𝒱 when V = 0",
            Anchor::ExtraCasimir => "2M̂Ĥ - P̂_i P̂^i = 2m𝒱",
            Anchor::Ehrenfest => "d⟨X̂⟩/dt = ⟨P̂⟩/m",
            Anchor::ComDecoupling => "Ĥ_phys = P̂²/2m + Q̂²/2μ + V(R̂·R̂)",
            Anchor::RotationInvariance => "[Ĥ_phys, Ĵ_ij] = 0 for V(R̂·R̂)",
            Anchor::SpinConservation => "[Ĥ_phys, Ŝ_ij] = 0 for V(R̂·R̂)",
            Anchor::TruncationGuard => "top-level Fock occupation below the leakage threshold",
        }
    }
}

impl Serialize for Anchor {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn anchor_strings_are_distinct() {
        let set: BTreeSet<&str> = Anchor::ALL.iter().map(|a| a.as_str()).collect();
        assert_eq!(set.len(), Anchor::ALL.len());
    }
}
