use valdyn_core::blowup::*;
use valdyn_core::dynamics::*;
use valdyn_core::poly::parse_map;
use valdyn_core::valuation::*;
use num_rational::BigRational;
use num_bigint::BigInt;
use std::sync::Arc;

fn main() {
    let rat = |n: i64| BigRational::from_integer(BigInt::from(n));
    'outer: for m in ["z2; z1*z2", "z1^2; z1*z2^2", "z1^2; z2^2", "z1^3; z2^2"] {
        let germ = MapGerm::infinity(parse_map(m).unwrap()).unwrap();
        for c1 in -2..3i64 {
            for c2 in -2..3i64 {
                for p2 in 0..2usize {
                    let mut seq = BlowupSeq::new(Mode::Infinity);
                    seq = seq.apply_blowup(BlowupStep::Free { parent: 0, at: FreePoint::Coord(rat(c1)) }).unwrap();
                    let s2 = seq.apply_blowup(BlowupStep::Free { parent: p2, at: FreePoint::Coord(rat(c2)) });
                    let seq = match s2 { Ok(s) if s.is_tight().unwrap().iter().all(|t| *t) => s, _ => seq };
                    let seq = Arc::new(seq);
                    for p in 0..seq.num_primes() {
                        let v = Valuation::divisorial(seq.clone(), p);
                        let Ok(push) = Pushforward::new(&germ, &v) else { continue };
                        let Ok((rseq, rgraph, gp)) = refine_until_exact_eval(&v.seq, &push) else { println!("{m} c1={c1} c2={c2} p2={p2} E{p}: refine ERR"); continue 'outer };
                        let fv = Valuation::embed(Arc::new(rseq), &rgraph, &gp).unwrap();
                        let (alpha, a, _) = fv.parametrize().unwrap();
                        let bad = alpha < valdyn_core::numbers::ExtValue::zero() || a > valdyn_core::numbers::ExtValue::zero();
                        if bad {
                            println!("BAD {m} c1={c1} c2={c2} p2={p2} E{p}: gp={gp:?} alpha={alpha} A={a}");
                            continue 'outer;
                        }
                    }
                }
            }
        }
        println!("{m}: all ok");
    }
}
