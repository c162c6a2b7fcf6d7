#![allow(dead_code)]

use proptest::prelude::*;
use qshare_core::bundle::Bundle;
use qshare_core::downset;
use qshare_core::rational::int;
use qshare_core::{Matroid, Valuation};

pub fn additive(m: usize) -> impl Strategy<Value = Valuation> {
    prop::collection::vec(0i64..20, m).prop_map(|w| Valuation::additive(w.into_iter().map(int).collect()).unwrap())
}

pub fn unit_demand(m: usize) -> impl Strategy<Value = Valuation> {
    prop::collection::vec(0i64..20, m).prop_map(|w| Valuation::unit_demand(w.into_iter().map(int).collect()).unwrap())
}

/// Random values made monotone by closing upward.
pub fn monotone_values(m: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(0i64..8, 1 << m).prop_map(move |mut v| {
        v[0] = 0;
        for s in 1..1usize << m {
            for j in 0..m {
                if s >> j & 1 == 1 {
                    v[s] = v[s].max(v[s ^ 1 << j]);
                }
            }
        }
        v
    })
}

pub fn table(m: usize) -> impl Strategy<Value = Valuation> {
    monotone_values(m).prop_map(move |v| Valuation::table(m, v.into_iter().map(int).collect()).unwrap())
}

/// Down-set over `m ≤ 6` goods: closure of random generators.
pub fn down_set(m: usize) -> impl Strategy<Value = u64> {
    prop::collection::vec(any::<bool>(), 1 << m).prop_map(move |bits| {
        let gens = bits
            .iter()
            .enumerate()
            .filter(|(s, &b)| b && (*s as u32).count_ones() as usize * 2 <= m + 1)
            .fold(0u64, |acc, (s, _)| acc | 1 << s);
        downset::down_closure(m, gens)
    })
}

pub fn explicit01(m: usize) -> impl Strategy<Value = Valuation> {
    down_set(m).prop_map(move |f| downset::to_valuation(m, f).unwrap())
}

pub fn matroid(m: usize) -> impl Strategy<Value = Matroid> {
    let uniform = (0..=m).prop_map(move |k| Matroid::uniform(m, k).unwrap());
    let partition = (prop::collection::vec(0..3usize, m), prop::collection::vec(0..3usize, 3)).prop_map(move |(block_of, caps)| {
        let blocks = (0..3)
            .map(|b| (Bundle::from_goods((0..m).filter(|&g| block_of[g] == b)), caps[b]))
            .filter(|(s, _)| !s.is_empty())
            .collect();
        Matroid::partition(m, blocks).unwrap()
    });
    let graphic = prop::collection::vec((0..5usize, 0..5usize), m)
        .prop_map(move |edges| Matroid::graphic(5, edges).unwrap());
    prop_oneof![uniform, partition, graphic]
}

pub fn any_valuation(m: usize) -> BoxedStrategy<Valuation> {
    let mut choices = vec![
        additive(m).boxed(),
        unit_demand(m).boxed(),
        matroid(m).prop_map(Valuation::matroid_rank).boxed(),
    ];
    if m <= 10 {
        choices.push(table(m).boxed());
    }
    if m <= 6 {
        choices.push(explicit01(m).boxed());
    }
    prop::strategy::Union::new(choices).boxed()
}
