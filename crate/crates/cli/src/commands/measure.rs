use renyi_core::classic::divergence_slices;
use renyi_core::{
    cond_entropy_variant, mutual_info_variant, renyi_entropy, Branch, CondEntropyVariant, JointPmf,
    MutualInfoVariant, Pmf,
};

use super::{order, scaled, tilde};
use crate::args::{MeasureArgs, Quantity, RunConfig};
use crate::error::CliError;
use crate::io::{fmt_f64, read_input, Input, Table};

pub const HEADER: [&str; 5] = ["quantity", "alpha", "beta", "value", "branch"];

fn one_parameter(q: Quantity, joint: &JointPmf, a: f64) -> Result<(f64, Branch), CliError> {
    use CondEntropyVariant as H;
    use MutualInfoVariant as I;
    let o = order(a, "alpha")?;
    let r = match q {
        Quantity::H => cond_entropy_variant(H::H, joint, o),
        Quantity::HStar => cond_entropy_variant(H::HStar, joint, o),
        Quantity::HBar => cond_entropy_variant(H::HBar, joint, o),
        Quantity::HBarStar => cond_entropy_variant(H::HBarStar, joint, o),
        Quantity::I => mutual_info_variant(I::I, joint, o),
        Quantity::IStar => mutual_info_variant(I::IStar, joint, o),
        Quantity::IBar => mutual_info_variant(I::IBar, joint, o),
        Quantity::IBarStar => mutual_info_variant(I::IBarStar, joint, o),
        Quantity::Entropy => {
            let flat = Pmf::from_probs(joint.probs().to_vec())?;
            renyi_entropy(&flat, o)
        }
        _ => unreachable!("two-parameter and divergence rows are built elsewhere"),
    };
    Ok((r.value, r.branch))
}

pub fn measure(cfg: &RunConfig, args: &MeasureArgs) -> Result<Vec<u8>, CliError> {
    let inputs = args.input.iter().map(|p| read_input(p)).collect::<Result<Vec<_>, _>>()?;
    let quantities = if args.quantity.is_empty() {
        match inputs.as_slice() {
            [Input::Joint(_)] => Quantity::JOINT.to_vec(),
            [Input::Marginal(_)] => vec![Quantity::Entropy],
            [_, _] => vec![Quantity::D],
            _ => return Err(CliError::config("measure takes one input, or two for D")),
        }
    } else {
        args.quantity.clone()
    };

    let mut t = Table::new(&cfg.comment("measure", ""), &HEADER)?;
    let alphas = &args.alpha.0;
    let betas = &args.beta.0;
    for q in quantities {
        match q {
            Quantity::D => {
                let (p, r) = match inputs.as_slice() {
                    [Input::Marginal(p), Input::Marginal(r)] if p.len() == r.len() => (p.probs(), r.probs()),
                    [Input::Joint(p), Input::Joint(r)] if p.nx() == r.nx() && p.ny() == r.ny() => (p.probs(), r.probs()),
                    _ => return Err(CliError::config("d needs two inputs of the same kind and size")),
                };
                for &a in alphas {
                    let v = divergence_slices(p, r, order(a, "alpha")?);
                    t.row([q.name().into(), fmt_f64(a), String::new(), scaled(v, cfg), Branch::of(order(a, "alpha")?).name().into()])?;
                }
            }
            Quantity::Entropy => {
                let joint = match inputs.first() {
                    Some(Input::Joint(j)) => j.clone(),
                    Some(Input::Marginal(p)) => {
                        JointPmf::new(p.alphabet().to_vec(), vec!["_".into()], p.probs().to_vec())?
                    }
                    None => return Err(CliError::config("entropy needs an input")),
                };
                for &a in alphas {
                    let (v, b) = one_parameter(q, &joint, a)?;
                    t.row([q.name().into(), fmt_f64(a), String::new(), scaled(v, cfg), b.name().into()])?;
                }
            }
            _ => {
                let Some(Input::Joint(joint)) = inputs.first() else {
                    return Err(CliError::config(format!("{} needs a joint input", q.name())));
                };
                if q.two_parameter() {
                    for &a in alphas {
                        for &b in betas {
                            let (v, branch) = tilde(q, joint, a, b, args.strict_corner)?;
                            t.row([q.name().into(), fmt_f64(a), fmt_f64(b), scaled(v, cfg), branch.into()])?;
                        }
                    }
                } else {
                    for &a in alphas {
                        let (v, branch) = one_parameter(q, joint, a)?;
                        t.row([q.name().into(), fmt_f64(a), String::new(), scaled(v, cfg), branch.name().into()])?;
                    }
                }
            }
        }
    }
    t.into_bytes()
}
