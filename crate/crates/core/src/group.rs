//! Finite abelian groups given as direct sums of cyclic groups.
//!
//! Elements are encoded in mixed radix over the factor orders exactly as the
//! user wrote them: `(a_1, ..., a_k)` becomes `a_1 + m_1 (a_2 + m_2 (...))`.
//! The 2-primary decomposition `Z_{2^a1} + ... + Z_{2^ar1} + Z_2^{r2} + K` is
//! computed as metadata and never changes the encoding.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::subset::GroupSubset;

/// Largest supported group order.
pub const MAX_ORDER: usize = 1 << 24;
/// Groups up to this order get a full addition table.
pub const TABLE_CAP: usize = 4096;
/// Cap for exhaustive subgroup enumeration.
pub const SUBGROUP_ENUM_CAP: usize = 128;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Element(pub usize);

impl Element {
    pub const ZERO: Element = Element(0);

    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// `Z_{2^a1} + ... + Z_{2^ar1} + Z_2^{r2} + K` with `|K|` odd.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoPrimary {
    /// Exponents `a_i >= 2`, sorted non-increasing.
    pub alphas: Vec<u32>,
    pub r2: u32,
    pub odd_order: u64,
}

impl TwoPrimary {
    pub fn r1(&self) -> u32 {
        self.alphas.len() as u32
    }

    pub fn r(&self) -> u32 {
        self.r1() + self.r2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GroupType {
    /// `p` is the smallest prime `= 2 (mod 3)` dividing the order.
    TypeI(u64),
    TypeII,
    /// Carries the exponent of the group.
    TypeIII(u64),
}

impl fmt::Display for GroupType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupType::TypeI(p) => write!(f, "TypeI({p})"),
            GroupType::TypeII => write!(f, "TypeII"),
            GroupType::TypeIII(m) => write!(f, "TypeIII({m})"),
        }
    }
}

/// A homomorphism `G -> Z_p`, stored as the images of the cyclic generators.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ZpHom {
    pub p: u64,
    pub images: Vec<u64>,
}

impl ZpHom {
    pub fn apply(&self, g: &AbelianGroup, x: Element) -> u64 {
        let mut acc = 0u64;
        let mut rest = x.0 as u64;
        for (m, c) in g.orders.iter().zip(&self.images) {
            let a = rest % m;
            rest /= m;
            acc = (acc + (a % self.p) * c) % self.p;
        }
        acc
    }

    pub fn is_surjective(&self) -> bool {
        self.images.iter().any(|&c| c != 0)
    }

    pub fn kernel(&self, g: &AbelianGroup) -> GroupSubset {
        self.preimage(g, &[0])
    }

    pub fn preimage(&self, g: &AbelianGroup, targets: &[u64]) -> GroupSubset {
        GroupSubset::from_elements(
            g.order(),
            g.elements().filter(|&x| targets.contains(&self.apply(g, x))),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subgroup {
    pub members: GroupSubset,
    /// Rank of the 2-primary part: the subgroup holds `2^rank2 - 1` elements of order 2.
    pub rank2: u32,
    pub index: usize,
}

impl Subgroup {
    /// Wraps a member set after checking it is a subgroup.
    pub fn from_members(g: &AbelianGroup, members: GroupSubset) -> Result<Self> {
        if !g.is_subgroup(&members) {
            return Err(Error::InvalidArgument(format!(
                "{members:?} is not a subgroup of {g}"
            )));
        }
        Ok(Self::trusted(g, members))
    }

    fn trusted(g: &AbelianGroup, members: GroupSubset) -> Self {
        let order2 = members
            .iter()
            .filter(|&x| x != Element::ZERO && g.double(x) == Element::ZERO)
            .count();
        debug_assert!((order2 + 1).is_power_of_two());
        Subgroup {
            rank2: (order2 + 1).trailing_zeros(),
            index: g.order() / members.len(),
            members,
        }
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }
}

/// A subgroup of prime index together with the homomorphism it is the kernel of.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeIndexSubgroup {
    pub subgroup: Subgroup,
    pub hom: ZpHom,
}

pub struct AbelianGroup {
    orders: Vec<u64>,
    n: usize,
    two_primary: TwoPrimary,
    neg: Vec<u32>,
    add: Option<Vec<u16>>,
}

impl fmt::Debug for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AbelianGroup")
            .field("orders", &self.orders)
            .field("n", &self.n)
            .field("two_primary", &self.two_primary)
            .finish()
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.orders.iter().map(|m| format!("Z{m}")).collect();
        write!(f, "{}", parts.join("+"))
    }
}

impl Clone for AbelianGroup {
    fn clone(&self) -> Self {
        AbelianGroup {
            orders: self.orders.clone(),
            n: self.n,
            two_primary: self.two_primary.clone(),
            neg: self.neg.clone(),
            add: self.add.clone(),
        }
    }
}

impl PartialEq for AbelianGroup {
    fn eq(&self, other: &Self) -> bool {
        self.orders == other.orders
    }
}

impl Eq for AbelianGroup {}

impl AbelianGroup {
    pub fn new(orders: &[u64]) -> Result<Self> {
        if orders.is_empty() {
            return Err(Error::EmptySpec);
        }
        let mut n: usize = 1;
        for &m in orders {
            if m < 2 {
                return Err(Error::OrderTooSmall(m));
            }
            n = usize::try_from(m)
                .ok()
                .and_then(|m| n.checked_mul(m))
                .filter(|&n| n <= MAX_ORDER)
                .ok_or(Error::OrderOverflow { cap: MAX_ORDER })?;
        }
        let two_primary = decompose(orders);
        let mut g = AbelianGroup {
            orders: orders.to_vec(),
            n,
            two_primary,
            neg: Vec::new(),
            add: None,
        };
        g.neg = (0..n).map(|x| g.neg_slow(Element(x)).0 as u32).collect();
        if n <= TABLE_CAP {
            let coords: Vec<Vec<u64>> = (0..n).map(|x| g.coords(Element(x))).collect();
            let mut table = vec![0u16; n * n];
            let mut sum = vec![0u64; orders.len()];
            for a in 0..n {
                for b in a..n {
                    for (i, m) in orders.iter().enumerate() {
                        sum[i] = (coords[a][i] + coords[b][i]) % m;
                    }
                    let c = g.encode(&sum) as u16;
                    table[a * n + b] = c;
                    table[b * n + a] = c;
                }
            }
            g.add = Some(table);
        }
        Ok(g)
    }

    /// Parses a comma-separated list of cyclic orders such as `"4,2,3"`.
    /// Whitespace is ignored.
    pub fn parse(spec: &str) -> Result<Self> {
        Self::new(&parse_orders(spec)?)
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn factor_orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn two_primary(&self) -> &TwoPrimary {
        &self.two_primary
    }

    pub fn r(&self) -> u32 {
        self.two_primary.r()
    }

    pub fn r1(&self) -> u32 {
        self.two_primary.r1()
    }

    pub fn r2(&self) -> u32 {
        self.two_primary.r2
    }

    pub fn spec_string(&self) -> String {
        self.orders
            .iter()
            .map(|m| m.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn elements(&self) -> impl Iterator<Item = Element> {
        (0..self.n).map(Element)
    }

    pub fn element(&self, index: usize) -> Result<Element> {
        if index < self.n {
            Ok(Element(index))
        } else {
            Err(Error::ElementOutOfRange { index, n: self.n })
        }
    }

    pub fn coords(&self, x: Element) -> Vec<u64> {
        let mut rest = x.0 as u64;
        self.orders
            .iter()
            .map(|m| {
                let a = rest % m;
                rest /= m;
                a
            })
            .collect()
    }

    /// Encodes a coordinate tuple; each coordinate is reduced modulo its factor.
    pub fn from_coords(&self, coords: &[u64]) -> Result<Element> {
        if coords.len() != self.orders.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} coordinates, got {}",
                self.orders.len(),
                coords.len()
            )));
        }
        let reduced: Vec<u64> = coords
            .iter()
            .zip(&self.orders)
            .map(|(a, m)| a % m)
            .collect();
        Ok(Element(self.encode(&reduced)))
    }

    fn encode(&self, coords: &[u64]) -> usize {
        coords
            .iter()
            .zip(&self.orders)
            .rev()
            .fold(0u64, |acc, (a, m)| acc * m + a) as usize
    }

    pub fn add(&self, a: Element, b: Element) -> Element {
        match &self.add {
            Some(t) => Element(t[a.0 * self.n + b.0] as usize),
            None => self.add_slow(a, b),
        }
    }

    fn add_slow(&self, a: Element, b: Element) -> Element {
        let (mut ra, mut rb) = (a.0 as u64, b.0 as u64);
        let mut out = 0u64;
        let mut place = 1u64;
        for m in &self.orders {
            let s = (ra % m + rb % m) % m;
            ra /= m;
            rb /= m;
            out += s * place;
            place *= m;
        }
        Element(out as usize)
    }

    pub fn neg(&self, a: Element) -> Element {
        Element(self.neg[a.0] as usize)
    }

    fn neg_slow(&self, a: Element) -> Element {
        let c: Vec<u64> = self
            .coords(a)
            .iter()
            .zip(&self.orders)
            .map(|(x, m)| (m - x) % m)
            .collect();
        Element(self.encode(&c))
    }

    pub fn sub(&self, a: Element, b: Element) -> Element {
        self.add(a, self.neg(b))
    }

    pub fn double(&self, a: Element) -> Element {
        self.add(a, a)
    }

    /// `k * x`.
    pub fn times(&self, k: u64, x: Element) -> Element {
        let c: Vec<u64> = self
            .coords(x)
            .iter()
            .zip(&self.orders)
            .map(|(a, m)| ((k % m) * a) % m)
            .collect();
        Element(self.encode(&c))
    }

    /// Smallest `t >= 1` with `t x = 0`.
    pub fn element_order(&self, x: Element) -> u64 {
        self.coords(x)
            .iter()
            .zip(&self.orders)
            .map(|(&a, &m)| m / gcd(a, m))
            .fold(1, lcm)
    }

    /// Largest element order, i.e. the lcm of the factor orders.
    pub fn exponent(&self) -> u64 {
        self.orders.iter().copied().fold(1, lcm)
    }

    pub fn classify(&self) -> GroupType {
        let primes: Vec<u64> = factorize(self.n as u64).into_iter().map(|(p, _)| p).collect();
        if let Some(&p) = primes.iter().find(|&&p| p % 3 == 2) {
            GroupType::TypeI(p)
        } else if primes.contains(&3) {
            GroupType::TypeII
        } else {
            GroupType::TypeIII(self.exponent())
        }
    }

    /// Largest size of a sum-free subset, from the classification formula.
    pub fn mu(&self) -> Result<usize> {
        let n = self.n as u64;
        let (num, den) = match self.classify() {
            GroupType::TypeI(p) => (n * (p + 1), 3 * p),
            GroupType::TypeII => (n, 3),
            GroupType::TypeIII(m) => (n * (m - 1), 3 * m),
        };
        if num % den != 0 {
            return Err(Error::Internal(format!(
                "mu formula non-integral for {self}: {num}/{den}"
            )));
        }
        Ok((num / den) as usize)
    }

    /// `{ x : 2x = target }`.
    pub fn solutions_2x(&self, target: Element) -> GroupSubset {
        GroupSubset::from_elements(self.n, self.elements().filter(|&x| self.double(x) == target))
    }

    pub fn order2_elements(&self) -> GroupSubset {
        let mut s = self.solutions_2x(Element::ZERO);
        s.remove(Element::ZERO);
        s
    }

    /// The subgroup `2G = { 2g : g in G }`.
    pub fn two_g(&self) -> Subgroup {
        let members = GroupSubset::from_elements(self.n, self.elements().map(|x| self.double(x)));
        Subgroup::trusted(self, members)
    }

    pub fn is_subgroup(&self, s: &GroupSubset) -> bool {
        if s.universe() != self.n || !s.contains(Element::ZERO) {
            return false;
        }
        s.iter()
            .all(|a| s.contains(self.neg(a)) && s.iter().all(|b| s.contains(self.add(a, b))))
    }

    /// All homomorphisms `G -> Z_p` in lexicographic order of generator
    /// images (first factor most significant), surjective ones only.
    pub fn homs_to_zp(&self, p: u64) -> Vec<ZpHom> {
        // A generator of order m may map to c only when m c = 0 (mod p).
        let choices: Vec<u64> = self
            .orders
            .iter()
            .map(|&m| if m % p == 0 { p } else { 1 })
            .collect();
        let total: u64 = choices.iter().product();
        let mut out = Vec::new();
        let mut images = vec![0u64; self.orders.len()];
        for code in 0..total {
            let mut rest = code;
            for i in (0..images.len()).rev() {
                images[i] = rest % choices[i];
                rest /= choices[i];
            }
            let h = ZpHom { p, images: images.clone() };
            if h.is_surjective() {
                out.push(h);
            }
        }
        out
    }

    /// Kernels of the surjections onto `Z_p`, deduplicated, each paired with
    /// the first homomorphism (in [`homs_to_zp`](Self::homs_to_zp) order)
    /// that produced it.
    pub fn subgroups_of_prime_index(&self, p: u64) -> Vec<PrimeIndexSubgroup> {
        if p < 2 || !(self.n as u64).is_multiple_of(p) || !is_prime(p) {
            return Vec::new();
        }
        let mut out: Vec<PrimeIndexSubgroup> = Vec::new();
        for hom in self.homs_to_zp(p) {
            let kernel = hom.kernel(self);
            if out.iter().all(|s| s.subgroup.members != kernel) {
                out.push(PrimeIndexSubgroup {
                    subgroup: Subgroup::trusted(self, kernel),
                    hom,
                });
            }
        }
        out
    }

    pub fn index2_subgroups(&self) -> Result<Vec<Subgroup>> {
        if self.n % 2 == 1 {
            return Err(Error::NoIndexTwoSubgroup(self.n));
        }
        Ok(self
            .subgroups_of_prime_index(2)
            .into_iter()
            .map(|s| s.subgroup)
            .collect())
    }

    /// Subgroup generated by `gens`.
    pub fn generated(&self, gens: &[Element]) -> GroupSubset {
        let mut members = GroupSubset::from_elements(self.n, [Element::ZERO]);
        for &g in gens {
            members = self.join_cyclic(&members, g);
        }
        members
    }

    /// `H + <g>` for a subgroup `H`.
    fn join_cyclic(&self, h: &GroupSubset, g: Element) -> GroupSubset {
        let mut out = h.clone();
        let mut step = g;
        while !h.contains(step) {
            for x in h.iter() {
                out.insert(self.add(x, step));
            }
            step = self.add(step, g);
        }
        out
    }

    /// Every subgroup, by closure search from the trivial one.
    pub fn all_subgroups(&self) -> Result<Vec<GroupSubset>> {
        if self.n > SUBGROUP_ENUM_CAP {
            return Err(Error::CapExceeded {
                what: "subgroup enumeration",
                n: self.n,
                cap: SUBGROUP_ENUM_CAP,
            });
        }
        let trivial = GroupSubset::from_elements(self.n, [Element::ZERO]);
        let mut seen = std::collections::HashSet::new();
        seen.insert(trivial.clone());
        let mut frontier = vec![trivial];
        let mut all = Vec::new();
        while let Some(h) = frontier.pop() {
            let mut covered = h.clone();
            for g in self.elements() {
                if covered.contains(g) {
                    continue;
                }
                let joined = self.join_cyclic(&h, g);
                // Every element of the coset g + H gives the same join.
                for x in h.iter() {
                    covered.insert(self.add(x, g));
                }
                if seen.insert(joined.clone()) {
                    frontier.push(joined);
                }
            }
            all.push(h);
        }
        all.sort();
        Ok(all)
    }

    pub fn count_subgroups_of_order(&self, k: usize) -> Result<usize> {
        if k == 0 || !self.n.is_multiple_of(k) {
            return Err(Error::InvalidArgument(format!(
                "{k} does not divide the group order {}",
                self.n
            )));
        }
        Ok(self.all_subgroups()?.iter().filter(|h| h.len() == k).count())
    }
}

fn decompose(orders: &[u64]) -> TwoPrimary {
    let mut alphas = Vec::new();
    let mut r2 = 0;
    let mut odd_order = 1u64;
    for &m in orders {
        let a = m.trailing_zeros();
        odd_order *= m >> a;
        match a {
            0 => {}
            1 => r2 += 1,
            _ => alphas.push(a),
        }
    }
    alphas.sort_unstable_by(|a, b| b.cmp(a));
    TwoPrimary { alphas, r2, odd_order }
}

pub fn parse_orders(spec: &str) -> Result<Vec<u64>> {
    let mut orders = Vec::new();
    let mut digits = String::new();
    let mut start_col = 1;
    let mut seen_any = false;
    let flush = |digits: &mut String, col: usize, orders: &mut Vec<u64>| -> Result<()> {
        if digits.is_empty() {
            return Err(Error::SpecSyntax {
                column: col,
                message: "expected a cyclic order".into(),
            });
        }
        let m: u64 = digits.parse().map_err(|_| Error::SpecSyntax {
            column: col,
            message: format!("order {digits} is too large"),
        })?;
        orders.push(m);
        digits.clear();
        Ok(())
    };
    for (i, ch) in spec.chars().enumerate() {
        let col = i + 1;
        match ch {
            c if c.is_whitespace() => {}
            c if c.is_ascii_digit() => {
                if digits.is_empty() {
                    start_col = col;
                }
                digits.push(c);
                seen_any = true;
            }
            ',' => {
                let at = if digits.is_empty() { col } else { start_col };
                flush(&mut digits, at, &mut orders)?;
                seen_any = true;
            }
            other => {
                return Err(Error::SpecSyntax {
                    column: col,
                    message: format!("unexpected character {other:?}"),
                })
            }
        }
    }
    if !seen_any {
        return Err(Error::EmptySpec);
    }
    flush(&mut digits, spec.chars().count() + 1, &mut orders)?;
    Ok(orders)
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

pub fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

/// Prime factorization as `(prime, exponent)` pairs in increasing order.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        let mut e = 0;
        while n.is_multiple_of(d) {
            n /= d;
            e += 1;
        }
        if e > 0 {
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn partitions(n: u32, max: u32) -> Vec<Vec<u32>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in (1..=n.min(max)).rev() {
        for mut rest in partitions(n - first, first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// One representative per isomorphism class of abelian groups of order `n`,
/// written as prime-power cyclic orders (primes ascending, powers descending).
pub fn abelian_groups_of_order(n: u64) -> Vec<Vec<u64>> {
    let mut classes: Vec<Vec<u64>> = vec![vec![]];
    for (p, e) in factorize(n) {
        let mut next = Vec::new();
        for prefix in &classes {
            for part in partitions(e, e) {
                let mut orders = prefix.clone();
                orders.extend(part.iter().map(|&k| p.pow(k)));
                next.push(orders);
            }
        }
        classes = next;
    }
    classes
}
