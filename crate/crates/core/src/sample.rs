//! Random generation and exhaustive enumeration of ground values.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use rand::Rng;

use crate::chc::{Datatypes, Sort, Value};

/// Smallest value size (as counted by [`Value::size`]) per ADT sort.
pub fn min_sizes(dt: &Datatypes) -> BTreeMap<String, usize> {
    let mut min: BTreeMap<String, usize> = BTreeMap::new();
    loop {
        let mut changed = false;
        for adt in dt.adts() {
            for c in &adt.constructors {
                let mut total = Some(1usize);
                for f in &c.fields {
                    let s = match &f.sort {
                        Sort::Adt(n) => min.get(n).copied(),
                        _ => Some(1),
                    };
                    total = total.zip(s).map(|(a, b)| a + b);
                }
                if let Some(t) = total {
                    if min.get(&adt.name).is_none_or(|&m| t < m) {
                        min.insert(adt.name.clone(), t);
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            return min;
        }
    }
}

/// Random ground values of one ADT sort with a size budget.
pub struct ValueSampler<'a> {
    dt: &'a Datatypes,
    min: BTreeMap<String, usize>,
    pub int_lo: i64,
    pub int_hi: i64,
}

impl<'a> ValueSampler<'a> {
    pub fn new(dt: &'a Datatypes, int_lo: i64, int_hi: i64) -> ValueSampler<'a> {
        ValueSampler {
            dt,
            min: min_sizes(dt),
            int_lo,
            int_hi,
        }
    }

    fn min_of(&self, s: &Sort) -> usize {
        match s {
            Sort::Adt(n) => self.min.get(n).copied().unwrap_or(usize::MAX / 4),
            _ => 1,
        }
    }

    /// A value whose size is at most `budget` (or the minimum possible size
    /// when the budget is smaller).
    pub fn value<R: Rng>(&self, sort: &Sort, budget: usize, rng: &mut R) -> Value {
        match sort {
            Sort::Adt(n) => self.adt(n, budget, rng),
            _ => Value::int(rng.gen_range(self.int_lo..=self.int_hi)),
        }
    }

    /// Picks a target size uniformly in `1..=max_size`, then a value within it.
    pub fn stratified<R: Rng>(&self, sort: &Sort, max_size: usize, rng: &mut R) -> Value {
        let budget = rng.gen_range(1..=max_size.max(1));
        self.value(sort, budget, rng)
    }

    fn adt<R: Rng>(&self, name: &str, budget: usize, rng: &mut R) -> Value {
        let decl = self.dt.adt(name).expect("declared ADT");
        let mins: Vec<usize> = decl
            .constructors
            .iter()
            .map(|c| 1 + c.fields.iter().map(|f| self.min_of(&f.sort)).sum::<usize>())
            .collect();
        let fitting: Vec<usize> = (0..mins.len()).filter(|&i| mins[i] <= budget).collect();
        let pick = if fitting.is_empty() {
            (0..mins.len()).min_by_key(|&i| mins[i]).unwrap()
        } else {
            fitting[rng.gen_range(0..fitting.len())]
        };
        let c = &decl.constructors[pick];
        let mut spare = budget.saturating_sub(mins[pick]);
        let mut args = Vec::with_capacity(c.fields.len());
        let adt_fields = c.fields.iter().filter(|f| f.sort.is_adt()).count();
        let mut adt_seen = 0;
        for f in &c.fields {
            let m = self.min_of(&f.sort);
            if f.sort.is_adt() {
                adt_seen += 1;
                let extra = if adt_seen == adt_fields { spare } else { rng.gen_range(0..=spare) };
                spare -= extra;
                args.push(self.adt(f.sort.adt_name().unwrap(), m + extra, rng));
            } else {
                args.push(Value::int(rng.gen_range(self.int_lo..=self.int_hi)));
            }
        }
        Value::Adt(c.clone(), args)
    }
}

/// All values of `sort` with size at most `max_size`, integers drawn from `ints`.
pub fn enumerate(dt: &Datatypes, sort: &Sort, max_size: usize, ints: &[BigInt]) -> Vec<Value> {
    let mut memo = BTreeMap::new();
    enumerate_memo(dt, sort, max_size, ints, &mut memo)
}

fn enumerate_memo(
    dt: &Datatypes,
    sort: &Sort,
    budget: usize,
    ints: &[BigInt],
    memo: &mut BTreeMap<(String, usize), Vec<Value>>,
) -> Vec<Value> {
    let name = match sort {
        Sort::Adt(n) => n.clone(),
        _ => return ints.iter().cloned().map(Value::Int).collect(),
    };
    if budget == 0 {
        return Vec::new();
    }
    if let Some(v) = memo.get(&(name.clone(), budget)) {
        return v.clone();
    }
    let mut out = Vec::new();
    for c in &dt.adt(&name).expect("declared ADT").constructors {
        // Partial argument lists paired with the size used so far.
        let mut partial: Vec<(Vec<Value>, usize)> = vec![(Vec::new(), 1)];
        for f in &c.fields {
            let mut next = Vec::new();
            for (args, used) in &partial {
                if *used >= budget && f.sort.is_adt() {
                    continue;
                }
                let options = if f.sort.is_adt() {
                    enumerate_memo(dt, &f.sort, budget - used, ints, memo)
                } else if *used < budget {
                    ints.iter().cloned().map(Value::Int).collect()
                } else {
                    Vec::new()
                };
                for o in options {
                    let s = o.size();
                    if used + s <= budget {
                        let mut a = args.clone();
                        a.push(o);
                        next.push((a, used + s));
                    }
                }
            }
            partial = next;
        }
        out.extend(partial.into_iter().map(|(args, _)| Value::Adt(c.clone(), args)));
    }
    memo.insert((name, budget), out.clone());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chc::{adt_decl, AdtFamily};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ilist() -> Datatypes {
        Datatypes::new(vec![AdtFamily {
            adts: vec![adt_decl(
                "ilist",
                &[("nil", &[]), ("cons", &[("head", Sort::Int), ("tail", Sort::adt("ilist"))])],
            )],
        }])
        .unwrap()
    }

    #[test]
    fn enumeration_counts() {
        let dt = ilist();
        let ints: Vec<BigInt> = (0..2).map(BigInt::from).collect();
        // nil (1), cons(i, nil) (3) with two integers, cons(i, cons(j, nil)) (5).
        assert_eq!(enumerate(&dt, &Sort::adt("ilist"), 1, &ints).len(), 1);
        assert_eq!(enumerate(&dt, &Sort::adt("ilist"), 3, &ints).len(), 3);
        assert_eq!(enumerate(&dt, &Sort::adt("ilist"), 5, &ints).len(), 7);
    }

    #[test]
    fn sampled_values_respect_budget() {
        let dt = ilist();
        let s = ValueSampler::new(&dt, -3, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let v = s.stratified(&Sort::adt("ilist"), 8, &mut rng);
            assert!(v.size() <= 8);
        }
    }
}
