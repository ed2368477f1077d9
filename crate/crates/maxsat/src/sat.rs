//! A conflict-driven clause-learning SAT solver: two watched literals,
//! VSIDS with phase saving, first-UIP learning with recursive minimization,
//! Luby restarts, LBD-based clause deletion, and solving under assumptions.
//! The search is deterministic.

use std::time::Instant;

/// Literal: `2 * var + negated`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit(u32);

impl Lit {
    pub fn new(var: u32, negated: bool) -> Lit {
        Lit(var << 1 | negated as u32)
    }

    /// From a DIMACS literal (variables are 1-based).
    pub fn from_dimacs(l: i32) -> Lit {
        assert!(l != 0, "0 is not a literal");
        Lit::new(l.unsigned_abs() - 1, l < 0)
    }

    pub fn to_dimacs(self) -> i32 {
        let v = self.var() as i32 + 1;
        if self.is_negated() {
            -v
        } else {
            v
        }
    }

    pub fn var(self) -> u32 {
        self.0 >> 1
    }

    pub fn is_negated(self) -> bool {
        self.0 & 1 == 1
    }

    fn idx(self) -> usize {
        self.0 as usize
    }
}

impl std::ops::Not for Lit {
    type Output = Lit;
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveResult {
    Sat,
    /// Unsatisfiable (under the given assumptions, if any).
    Unsat,
    /// The deadline passed before an answer was found.
    Interrupted,
}

const UNDEF: i8 = 0;
const NO_REASON: u32 = u32::MAX;

struct Clause {
    lits: Vec<Lit>,
    learnt: bool,
    deleted: bool,
    lbd: u32,
    activity: f32,
}

#[derive(Clone, Copy)]
struct Watch {
    cref: u32,
    blocker: Lit,
}

/// Binary max-heap of variables keyed by activity.
#[derive(Default)]
struct VarHeap {
    heap: Vec<u32>,
    pos: Vec<i32>,
}

impl VarHeap {
    fn contains(&self, v: u32) -> bool {
        self.pos[v as usize] >= 0
    }

    fn up(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        while i > 0 {
            let p = (i - 1) / 2;
            if act[self.heap[p] as usize] >= act[v as usize] {
                break;
            }
            self.heap[i] = self.heap[p];
            self.pos[self.heap[i] as usize] = i as i32;
            i = p;
        }
        self.heap[i] = v;
        self.pos[v as usize] = i as i32;
    }

    fn down(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        let n = self.heap.len();
        loop {
            let l = 2 * i + 1;
            if l >= n {
                break;
            }
            let r = l + 1;
            let c = if r < n && act[self.heap[r] as usize] > act[self.heap[l] as usize] {
                r
            } else {
                l
            };
            if act[self.heap[c] as usize] <= act[v as usize] {
                break;
            }
            self.heap[i] = self.heap[c];
            self.pos[self.heap[i] as usize] = i as i32;
            i = c;
        }
        self.heap[i] = v;
        self.pos[v as usize] = i as i32;
    }

    fn insert(&mut self, v: u32, act: &[f64]) {
        if self.pos.len() <= v as usize {
            self.pos.resize(v as usize + 1, -1);
        }
        if self.contains(v) {
            return;
        }
        self.heap.push(v);
        let i = self.heap.len() - 1;
        self.pos[v as usize] = i as i32;
        self.up(i, act);
    }

    fn pop(&mut self, act: &[f64]) -> Option<u32> {
        let top = *self.heap.first()?;
        let last = self.heap.pop().unwrap();
        self.pos[top as usize] = -1;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.pos[last as usize] = 0;
            self.down(0, act);
        }
        Some(top)
    }

    fn bumped(&mut self, v: u32, act: &[f64]) {
        if self.contains(v) {
            self.up(self.pos[v as usize] as usize, act);
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Stats {
    pub conflicts: u64,
    pub decisions: u64,
    pub propagations: u64,
    pub restarts: u64,
}

pub struct Solver {
    clauses: Vec<Clause>,
    free: Vec<u32>,
    watches: Vec<Vec<Watch>>,
    assigns: Vec<i8>,
    level: Vec<u32>,
    reason: Vec<u32>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    activity: Vec<f64>,
    var_inc: f64,
    cla_inc: f32,
    heap: VarHeap,
    polarity: Vec<bool>,
    seen: Vec<u8>,
    ok: bool,
    num_learnts: usize,
    max_learnts: f64,
    model: Vec<bool>,
    pub stats: Stats,
}

impl Default for Solver {
    fn default() -> Self {
        Solver::new()
    }
}

fn luby(y: f64, mut x: u64) -> f64 {
    let (mut size, mut seq) = (1u64, 0i32);
    while size < x + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    while size - 1 != x {
        size = (size - 1) >> 1;
        seq -= 1;
        x %= size;
    }
    y.powi(seq)
}

impl Solver {
    pub fn new() -> Solver {
        Solver {
            clauses: Vec::new(),
            free: Vec::new(),
            watches: Vec::new(),
            assigns: Vec::new(),
            level: Vec::new(),
            reason: Vec::new(),
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            activity: Vec::new(),
            var_inc: 1.0,
            cla_inc: 1.0,
            heap: VarHeap::default(),
            polarity: Vec::new(),
            seen: Vec::new(),
            ok: true,
            num_learnts: 0,
            max_learnts: 0.0,
            model: Vec::new(),
            stats: Stats::default(),
        }
    }

    pub fn num_vars(&self) -> u32 {
        self.assigns.len() as u32
    }

    pub fn new_var(&mut self) -> u32 {
        let v = self.num_vars();
        self.assigns.push(UNDEF);
        self.level.push(0);
        self.reason.push(NO_REASON);
        self.activity.push(0.0);
        self.polarity.push(true);
        self.seen.push(0);
        self.watches.push(Vec::new());
        self.watches.push(Vec::new());
        self.heap.insert(v, &self.activity);
        v
    }

    /// Makes sure variables `0..n` exist.
    pub fn reserve_vars(&mut self, n: u32) {
        while self.num_vars() < n {
            self.new_var();
        }
    }

    /// Model of the last satisfiable call, indexed by variable.
    pub fn model(&self) -> &[bool] {
        &self.model
    }

    fn value(&self, l: Lit) -> i8 {
        let v = self.assigns[l.var() as usize];
        if l.is_negated() {
            -v
        } else {
            v
        }
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    fn enqueue(&mut self, l: Lit, reason: u32) {
        let v = l.var() as usize;
        self.assigns[v] = if l.is_negated() { -1 } else { 1 };
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(l);
    }

    fn alloc(&mut self, c: Clause) -> u32 {
        match self.free.pop() {
            Some(i) => {
                self.clauses[i as usize] = c;
                i
            }
            None => {
                self.clauses.push(c);
                (self.clauses.len() - 1) as u32
            }
        }
    }

    fn attach(&mut self, cref: u32) {
        let c = &self.clauses[cref as usize];
        let (a, b) = (c.lits[0], c.lits[1]);
        self.watches[(!a).idx()].push(Watch { cref, blocker: b });
        self.watches[(!b).idx()].push(Watch { cref, blocker: a });
    }

    /// Adds a clause of DIMACS literals; variables are created on demand.
    pub fn add_dimacs_clause(&mut self, lits: &[i32]) -> bool {
        let ls: Vec<Lit> = lits.iter().map(|&l| Lit::from_dimacs(l)).collect();
        self.add_clause(&ls)
    }

    /// Adds a permanent clause. Returns false once the clause set is known to
    /// be unsatisfiable.
    pub fn add_clause(&mut self, lits: &[Lit]) -> bool {
        if !self.ok {
            return false;
        }
        self.backtrack(0);
        if let Some(m) = lits.iter().map(|l| l.var()).max() {
            self.reserve_vars(m + 1);
        }
        let mut ls = lits.to_vec();
        ls.sort();
        ls.dedup();
        let mut out = Vec::with_capacity(ls.len());
        for (i, &l) in ls.iter().enumerate() {
            if i + 1 < ls.len() && ls[i + 1] == !l {
                return true; // tautology
            }
            match self.value(l) {
                1 => return true,
                -1 => {}
                _ => out.push(l),
            }
        }
        match out.len() {
            0 => {
                self.ok = false;
                false
            }
            1 => {
                self.enqueue(out[0], NO_REASON);
                self.ok = self.propagate() == NO_REASON;
                self.ok
            }
            _ => {
                let cref = self.alloc(Clause {
                    lits: out,
                    learnt: false,
                    deleted: false,
                    lbd: 0,
                    activity: 0.0,
                });
                self.attach(cref);
                true
            }
        }
    }

    /// Unit propagation; returns the conflicting clause or `NO_REASON`.
    fn propagate(&mut self) -> u32 {
        let mut conflict = NO_REASON;
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            let false_lit = !p;
            let mut ws = std::mem::take(&mut self.watches[p.idx()]);
            let (mut i, mut j) = (0, 0);
            'watches: while i < ws.len() {
                let w = ws[i];
                i += 1;
                if self.value(w.blocker) == 1 {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let cref = w.cref as usize;
                {
                    let c = &mut self.clauses[cref].lits;
                    if c[0] == false_lit {
                        c.swap(0, 1);
                    }
                }
                let first = self.clauses[cref].lits[0];
                let nw = Watch {
                    cref: w.cref,
                    blocker: first,
                };
                if first != w.blocker && self.value(first) == 1 {
                    ws[j] = nw;
                    j += 1;
                    continue;
                }
                let len = self.clauses[cref].lits.len();
                for k in 2..len {
                    let l = self.clauses[cref].lits[k];
                    if self.value(l) != -1 {
                        let c = &mut self.clauses[cref].lits;
                        c[1] = l;
                        c[k] = false_lit;
                        self.watches[(!l).idx()].push(nw);
                        continue 'watches;
                    }
                }
                ws[j] = nw;
                j += 1;
                if self.value(first) == -1 {
                    conflict = w.cref;
                    self.qhead = self.trail.len();
                    while i < ws.len() {
                        ws[j] = ws[i];
                        j += 1;
                        i += 1;
                    }
                } else {
                    self.enqueue(first, w.cref);
                }
            }
            ws.truncate(j);
            self.watches[p.idx()] = ws;
            if conflict != NO_REASON {
                break;
            }
        }
        conflict
    }

    fn backtrack(&mut self, lvl: u32) {
        if self.decision_level() <= lvl {
            return;
        }
        let lim = self.trail_lim[lvl as usize];
        for k in (lim..self.trail.len()).rev() {
            let l = self.trail[k];
            let v = l.var() as usize;
            self.assigns[v] = UNDEF;
            self.reason[v] = NO_REASON;
            self.polarity[v] = l.is_negated();
            self.heap.insert(v as u32, &self.activity);
        }
        self.trail.truncate(lim);
        self.trail_lim.truncate(lvl as usize);
        self.qhead = lim;
    }

    fn bump_var(&mut self, v: u32) {
        let a = &mut self.activity[v as usize];
        *a += self.var_inc;
        if *a > 1e100 {
            for x in &mut self.activity {
                *x *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.heap.bumped(v, &self.activity);
    }

    fn bump_clause(&mut self, cref: u32) {
        let c = &mut self.clauses[cref as usize];
        c.activity += self.cla_inc;
        if c.activity > 1e20 {
            for c in self.clauses.iter_mut().filter(|c| c.learnt) {
                c.activity *= 1e-20;
            }
            self.cla_inc *= 1e-20;
        }
    }

    fn abstract_level(&self, v: u32) -> u32 {
        1 << (self.level[v as usize] & 31)
    }

    fn redundant(&mut self, p: Lit, levels: u32, to_clear: &mut Vec<u32>) -> bool {
        let mut stack = vec![p];
        let top = to_clear.len();
        while let Some(q) = stack.pop() {
            let r = self.reason[q.var() as usize];
            let lits = self.clauses[r as usize].lits.clone();
            for &l in &lits[1..] {
                let v = l.var();
                if self.seen[v as usize] == 0 && self.level[v as usize] > 0 {
                    if self.reason[v as usize] != NO_REASON && self.abstract_level(v) & levels != 0 {
                        self.seen[v as usize] = 1;
                        stack.push(l);
                        to_clear.push(v);
                    } else {
                        for &u in &to_clear[top..] {
                            self.seen[u as usize] = 0;
                        }
                        to_clear.truncate(top);
                        return false;
                    }
                }
            }
        }
        true
    }

    /// First-UIP conflict analysis. Returns the learnt clause (asserting
    /// literal first) and the backtrack level.
    fn analyze(&mut self, mut confl: u32) -> (Vec<Lit>, u32) {
        let mut learnt = vec![Lit(0)];
        let mut path = 0;
        let mut p: Option<Lit> = None;
        let mut idx = self.trail.len();
        let mut to_clear = Vec::new();
        loop {
            if self.clauses[confl as usize].learnt {
                self.bump_clause(confl);
            }
            let start = usize::from(p.is_some());
            let lits = self.clauses[confl as usize].lits.clone();
            for &q in &lits[start..] {
                let v = q.var();
                if self.seen[v as usize] == 0 && self.level[v as usize] > 0 {
                    self.bump_var(v);
                    self.seen[v as usize] = 1;
                    to_clear.push(v);
                    if self.level[v as usize] >= self.decision_level() {
                        path += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                idx -= 1;
                if self.seen[self.trail[idx].var() as usize] != 0 {
                    break;
                }
            }
            let pl = self.trail[idx];
            p = Some(pl);
            confl = self.reason[pl.var() as usize];
            self.seen[pl.var() as usize] = 0;
            path -= 1;
            if path == 0 {
                break;
            }
        }
        learnt[0] = !p.unwrap();
        // recursive minimization
        let levels = learnt[1..]
            .iter()
            .fold(0, |acc, l| acc | self.abstract_level(l.var()));
        let mut keep = vec![learnt[0]];
        for k in 1..learnt.len() {
            let l = learnt[k];
            if self.reason[l.var() as usize] == NO_REASON || !self.redundant(l, levels, &mut to_clear) {
                keep.push(l);
            }
        }
        for v in to_clear {
            self.seen[v as usize] = 0;
        }
        let mut learnt = keep;
        let bt = if learnt.len() == 1 {
            0
        } else {
            let mut max_i = 1;
            for k in 2..learnt.len() {
                if self.level[learnt[k].var() as usize] > self.level[learnt[max_i].var() as usize] {
                    max_i = k;
                }
            }
            learnt.swap(1, max_i);
            self.level[learnt[1].var() as usize]
        };
        (learnt, bt)
    }

    fn lbd(&mut self, lits: &[Lit]) -> u32 {
        let mut levels: Vec<u32> = lits.iter().map(|l| self.level[l.var() as usize]).collect();
        levels.sort_unstable();
        levels.dedup();
        levels.len() as u32
    }

    fn locked(&self, cref: u32) -> bool {
        let c = &self.clauses[cref as usize];
        let v = c.lits[0].var() as usize;
        self.reason[v] == cref && self.value(c.lits[0]) == 1
    }

    fn reduce_db(&mut self) {
        let mut cands: Vec<u32> = (0..self.clauses.len() as u32)
            .filter(|&i| {
                let c = &self.clauses[i as usize];
                c.learnt && !c.deleted && c.lbd > 2 && c.lits.len() > 2
            })
            .filter(|&i| !self.locked(i))
            .collect();
        cands.sort_by(|&a, &b| {
            let (ca, cb) = (&self.clauses[a as usize], &self.clauses[b as usize]);
            cb.lbd
                .cmp(&ca.lbd)
                .then(ca.activity.partial_cmp(&cb.activity).unwrap())
        });
        let n = cands.len() / 2;
        for &i in &cands[..n] {
            let c = &mut self.clauses[i as usize];
            c.deleted = true;
            c.lits = Vec::new();
            self.num_learnts -= 1;
        }
        let clauses = &self.clauses;
        for ws in &mut self.watches {
            ws.retain(|w| !clauses[w.cref as usize].deleted);
        }
        self.free.extend_from_slice(&cands[..n]);
    }

    fn pick_branch(&mut self) -> Option<Lit> {
        while let Some(v) = self.heap.pop(&self.activity) {
            if self.assigns[v as usize] == UNDEF {
                return Some(Lit::new(v, self.polarity[v as usize]));
            }
        }
        None
    }

    /// Solves under `assumptions`. Learnt clauses are kept between calls.
    pub fn solve(&mut self, assumptions: &[Lit], deadline: Option<Instant>) -> SolveResult {
        if !self.ok {
            return SolveResult::Unsat;
        }
        if let Some(m) = assumptions.iter().map(|l| l.var()).max() {
            self.reserve_vars(m + 1);
        }
        self.backtrack(0);
        if self.propagate() != NO_REASON {
            self.ok = false;
            return SolveResult::Unsat;
        }
        self.max_learnts = self.max_learnts.max(self.clauses.len() as f64 / 3.0 + 1000.0);
        let mut restart = 0u64;
        loop {
            let budget = (luby(2.0, restart) * 100.0) as u64;
            restart += 1;
            match self.search(budget, assumptions, deadline) {
                Some(r) => {
                    if r == SolveResult::Sat {
                        self.model = self.assigns.iter().map(|&a| a == 1).collect();
                    }
                    self.backtrack(0);
                    return r;
                }
                None => self.stats.restarts += 1,
            }
        }
    }

    fn search(&mut self, budget: u64, assumptions: &[Lit], deadline: Option<Instant>) -> Option<SolveResult> {
        let mut conflicts = 0u64;
        loop {
            let confl = self.propagate();
            if confl != NO_REASON {
                self.stats.conflicts += 1;
                conflicts += 1;
                if self.decision_level() == 0 {
                    self.ok = false;
                    return Some(SolveResult::Unsat);
                }
                let (learnt, bt) = self.analyze(confl);
                self.backtrack(bt);
                if learnt.len() == 1 {
                    self.enqueue(learnt[0], NO_REASON);
                } else {
                    let lbd = self.lbd(&learnt);
                    let first = learnt[0];
                    let cref = self.alloc(Clause {
                        lits: learnt,
                        learnt: true,
                        deleted: false,
                        lbd,
                        activity: 0.0,
                    });
                    self.attach(cref);
                    self.bump_clause(cref);
                    self.num_learnts += 1;
                    self.enqueue(first, cref);
                }
                self.var_inc /= 0.95;
                self.cla_inc /= 0.999;
                if self.stats.conflicts % 256 == 0 {
                    if let Some(d) = deadline {
                        if Instant::now() >= d {
                            return Some(SolveResult::Interrupted);
                        }
                    }
                }
            } else {
                if conflicts >= budget {
                    self.backtrack(0);
                    return None;
                }
                if self.num_learnts as f64 >= self.max_learnts + self.trail.len() as f64 {
                    self.reduce_db();
                    self.max_learnts *= 1.1;
                }
                let mut next = None;
                while (self.decision_level() as usize) < assumptions.len() {
                    let a = assumptions[self.decision_level() as usize];
                    match self.value(a) {
                        1 => self.trail_lim.push(self.trail.len()),
                        -1 => return Some(SolveResult::Unsat),
                        _ => {
                            next = Some(a);
                            break;
                        }
                    }
                }
                let lit = match next {
                    Some(a) => a,
                    None => {
                        self.stats.decisions += 1;
                        match self.pick_branch() {
                            Some(l) => l,
                            None => return Some(SolveResult::Sat),
                        }
                    }
                };
                self.trail_lim.push(self.trail.len());
                self.enqueue(lit, NO_REASON);
            }
        }
    }
}
