use super::{
    ion_trap_model, nmr_default, photon_model, strongly_controllable_model, swap_model, ControlSystem, SwapVariant,
};
use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// Names accepted by [`parse_model`], with their parameter syntax.
pub fn model_names() -> &'static [(&'static str, &'static str)] {
    &[
        ("photon:N[:kappa]", "light and collective spin, N = 2 or 3 qunits, drift kappa x1p2 (+ x2p3)"),
        ("strong", "two oscillators whose controls alone generate sp(4)"),
        ("iontrap[:nu:r11:r21]", "cavity mode and two ion vibrational modes"),
        ("swap:squeezing", "drift x1p2 with local phase controls"),
        ("swap:linear", "drift x1p2 - x2p1 with local phase controls"),
        ("nmr:N", "N = 2 or 3 spins, z fields in [1, 2], nearest-neighbour zz coupling 0.5"),
    ]
}

fn number<T: Real>(name: &str, s: &str) -> Result<T> {
    s.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .map(lit)
        .ok_or_else(|| Error::UnknownModel(format!("{name}: cannot parse parameter '{s}'")))
}

fn count(name: &str, s: &str) -> Result<usize> {
    s.parse().map_err(|_| Error::UnknownModel(format!("{name}: cannot parse size '{s}'")))
}

/// Builds a model from its registry name, e.g. `photon:2`, `iontrap:1:1:0.5`, `nmr:3`.
pub fn parse_model<T: Real>(name: &str) -> Result<ControlSystem<T>> {
    let parts: Vec<&str> = name.trim().split(':').collect();
    let built = match parts.as_slice() {
        ["photon"] => photon_model(T::one(), 2),
        ["photon", n] => photon_model(T::one(), count(name, n)?),
        ["photon", n, kappa] => photon_model(number(name, kappa)?, count(name, n)?),
        ["strong"] => strongly_controllable_model(),
        ["iontrap"] => ion_trap_model(T::one(), T::one(), T::one()),
        ["iontrap", nu, r11, r21] => ion_trap_model(number(name, nu)?, number(name, r11)?, number(name, r21)?),
        ["swap"] | ["swap", "squeezing"] => swap_model(SwapVariant::Squeezing),
        ["swap", "linear"] => swap_model(SwapVariant::Linear),
        ["nmr"] => nmr_default(2),
        ["nmr", n] => nmr_default(count(name, n)?),
        _ => return Err(Error::UnknownModel(name.to_string())),
    };
    built.map_err(|e| match e {
        Error::InvalidArgument(msg) => Error::UnknownModel(format!("{name}: {msg}")),
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::Flavor;

    #[test]
    fn registry_names_resolve() {
        for n in ["photon:2", "photon:3", "photon:2:0.5", "strong", "iontrap", "iontrap:1:1:0", "swap:linear", "swap:squeezing", "nmr:2", "nmr:3"] {
            let sys = parse_model::<f64>(n).unwrap_or_else(|e| panic!("{n}: {e}"));
            assert!(sys.n_controls() > 0);
        }
        assert_eq!(parse_model::<f64>("nmr:3").unwrap().flavor(), Flavor::Unitary);
        assert_eq!(parse_model::<f64>("nmr:3").unwrap().dim(), 8);
    }

    #[test]
    fn unknown_names_rejected() {
        for n in ["laser", "photon:7", "photon:x", "nmr:9", "swap:weird", "iontrap:1"] {
            assert!(matches!(parse_model::<f64>(n), Err(Error::UnknownModel(_))), "{n}");
        }
    }
}
