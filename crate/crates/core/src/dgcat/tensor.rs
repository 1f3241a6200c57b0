use std::collections::BTreeMap;

use super::category::{BasisElement, CategoryError, FiniteDgCategory, HomComplex, HomVector};
use super::directed::DirectednessWitness;
use crate::scalar::sign;

/// Wraps compound labels in brackets so composite labels stay unambiguous.
pub fn wrap_label(label: &str) -> String {
    if label.contains(|c: char| c.is_whitespace() || c == '⊗' || c == '|' || c == ',') {
        format!("[{label}]")
    } else {
        label.to_string()
    }
}

pub fn tensor_label(a: &str, b: &str) -> String {
    format!("{} ⊗ {}", wrap_label(a), wrap_label(b))
}

pub fn pair_label(a: &str, b: &str) -> String {
    format!("({a},{b})")
}

/// Classical tensor product `C ⊗ D` with the Koszul sign
/// `(f⊗g)∘(f'⊗g') = (-1)^{|g||f'|} (f∘f')⊗(g∘g')`.
///
/// Objects are pairs `(c, d)` indexed `c * |Ob D| + d`; the basis of
/// `hom((x,u),(y,v))` is `a ⊗ b` indexed `a * dim D(u,v) + b`.
pub fn tensor(
    c: &FiniteDgCategory,
    d: &FiniteDgCategory,
) -> Result<FiniteDgCategory, CategoryError> {
    for (name, cat) in [("left", c), ("right", d)] {
        let r = cat.validate();
        if !r.passed() {
            return Err(CategoryError::InvalidInput(format!(
                "{name} factor: {}",
                r.first_failure().unwrap_or_default()
            )));
        }
    }
    let out = tensor_unchecked(c, d)?;
    let r = out.validate();
    if !r.passed() {
        return Err(CategoryError::Internal(format!(
            "tensor product fails validation: {}",
            r.first_failure().unwrap_or_default()
        )));
    }
    Ok(out)
}

/// [`tensor`] without validating inputs or output.
pub fn tensor_unchecked(
    c: &FiniteDgCategory,
    d: &FiniteDgCategory,
) -> Result<FiniteDgCategory, CategoryError> {
    let (nc, nd) = (c.num_objects(), d.num_objects());
    let obj = |x: usize, u: usize| x * nd + u;
    let mut objects = Vec::with_capacity(nc * nd);
    for x in 0..nc {
        for u in 0..nd {
            objects.push(pair_label(c.object_label(x), d.object_label(u)));
        }
    }
    let mut homs = BTreeMap::new();
    for x in 0..nc {
        for y in 0..nc {
            let hc = c.hom(x, y);
            if hc.is_empty() {
                continue;
            }
            for u in 0..nd {
                for v in 0..nd {
                    let hd = d.hom(u, v);
                    if hd.is_empty() {
                        continue;
                    }
                    let mut basis = Vec::new();
                    let mut diff = Vec::new();
                    for a in 0..hc.len() {
                        for b in 0..hd.len() {
                            basis.push(BasisElement::new(
                                tensor_label(&hc.basis[a].label, &hd.basis[b].label),
                                hc.degree(a) + hd.degree(b),
                            ));
                            let mut dv = HomVector::new();
                            for (a2, k) in hc.differential[a].iter() {
                                dv.add_term(a2 * hd.len() + b, k.clone());
                            }
                            let s = sign(hc.degree(a) as i64);
                            for (b2, k) in hd.differential[b].iter() {
                                dv.add_term(a * hd.len() + b2, &s * k);
                            }
                            diff.push(dv);
                        }
                    }
                    homs.insert((obj(x, u), obj(y, v)), HomComplex::new(basis, diff));
                }
            }
        }
    }
    let mut composition = BTreeMap::new();
    for x in 0..nc {
        for y in 0..nc {
            for z in 0..nc {
                let (cf, cg) = (c.hom(x, y), c.hom(y, z));
                if cf.is_empty() || cg.is_empty() {
                    continue;
                }
                for u in 0..nd {
                    for v in 0..nd {
                        for w in 0..nd {
                            let (df, dg) = (d.hom(u, v), d.hom(v, w));
                            if df.is_empty() || dg.is_empty() {
                                continue;
                            }
                            let out_d = d.hom(u, w).len();
                            let nf = cf.len() * df.len();
                            let ng = cg.len() * dg.len();
                            let mut table = vec![HomVector::new(); nf * ng];
                            for g1 in 0..cg.len() {
                                for g2 in 0..dg.len() {
                                    for f1 in 0..cf.len() {
                                        let cc = c.compose(x, y, z, g1, f1);
                                        if cc.is_zero() {
                                            continue;
                                        }
                                        for f2 in 0..df.len() {
                                            let dd = d.compose(u, v, w, g2, f2);
                                            let s =
                                                sign(dg.degree(g2) as i64 * cf.degree(f1) as i64);
                                            let mut r = HomVector::new();
                                            for (k1, a) in cc.iter() {
                                                for (k2, b) in dd.iter() {
                                                    r.add_term(k1 * out_d + k2, &(a * b) * &s);
                                                }
                                            }
                                            let g = g1 * dg.len() + g2;
                                            let f = f1 * df.len() + f2;
                                            table[g * nf + f] = r;
                                        }
                                    }
                                }
                            }
                            composition.insert((obj(x, u), obj(y, v), obj(z, w)), table);
                        }
                    }
                }
            }
        }
    }
    let identities = (0..nc)
        .flat_map(|x| (0..nd).map(move |u| (x, u)))
        .map(|(x, u)| c.identity(x) * d.hom(u, u).len() + d.identity(u))
        .collect();
    let out = FiniteDgCategory::new(objects, homs, composition, identities)?;
    match (c.directedness(), d.directedness()) {
        (Ok(wc), Ok(wd)) => {
            let levels = (0..nc)
                .flat_map(|x| (0..nd).map(move |u| (x, u)))
                .map(|(x, u)| wc.level(x) + wd.level(u))
                .collect();
            out.with_order(DirectednessWitness::new(levels))
        }
        _ => Ok(out),
    }
}
