use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use fmc_term::{Location, MemoryType, ValueType};

use crate::{Count, MeasureError};

/// The result of applying a functional: a count and an output memory.
pub type Applied<C> = Result<(C, SemMem<C>), MeasureError>;

type ApplyFn<C> = dyn Fn(SemMem<C>) -> Applied<C> + Send + Sync;

struct Inner<C: Count> {
    apply: Box<ApplyFn<C>>,
    collapse: OnceLock<C>,
}

/// A monotone functional tagged with its value type.
///
/// Applied to a memory, it consumes the top of each stack as given by the
/// input of its type and pushes its outputs; deeper items are untouched.
pub struct SemFun<C: Count> {
    ty: ValueType,
    inner: Arc<Inner<C>>,
}

impl<C: Count> Clone for SemFun<C> {
    fn clone(&self) -> Self {
        SemFun {
            ty: self.ty.clone(),
            inner: self.inner.clone(),
        }
    }
}

impl<C: Count> fmt::Debug for SemFun<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SemFun({})", self.ty)
    }
}

/// Input and output of a value type; a base type is the empty arrow.
pub(crate) fn arrow_parts(ty: &ValueType) -> (MemoryType, MemoryType) {
    match ty {
        ValueType::Arrow(i, o) => ((**i).clone(), (**o).clone()),
        ValueType::Base(_) => (MemoryType::empty(), MemoryType::empty()),
    }
}

impl<C: Count> SemFun<C> {
    pub fn new(ty: ValueType, apply: impl Fn(SemMem<C>) -> Applied<C> + Send + Sync + 'static) -> SemFun<C> {
        SemFun {
            ty,
            inner: Arc::new(Inner {
                apply: Box::new(apply),
                collapse: OnceLock::new(),
            }),
        }
    }

    pub fn ty(&self) -> &ValueType {
        &self.ty
    }

    pub fn input(&self) -> MemoryType {
        arrow_parts(&self.ty).0
    }

    pub fn output(&self) -> MemoryType {
        arrow_parts(&self.ty).1
    }

    pub fn apply(&self, mem: SemMem<C>) -> Applied<C> {
        (self.inner.apply)(mem)
    }

    /// The count at the least input. Cached.
    pub fn collapse(&self) -> Result<C, MeasureError> {
        if let Some(c) = self.inner.collapse.get() {
            return Ok(c.clone());
        }
        let (c, _) = self.apply(SemMem::zero(&self.input()))?;
        Ok(self.inner.collapse.get_or_init(|| c).clone())
    }

    /// The same functional with `k` added to every count.
    pub fn bumped(&self, k: C) -> SemFun<C> {
        let f = self.clone();
        SemFun::new(self.ty.clone(), move |mem| {
            let (n, out) = f.apply(mem)?;
            Ok((n.plus(&k), out))
        })
    }

    /// The count and the collapse of every output at `input`.
    pub fn observe(&self, input: SemMem<C>) -> Result<(C, Vec<C>), MeasureError> {
        let (n, out) = self.apply(input)?;
        Ok((n, out.profile()?))
    }
}

/// The least functional of a type: count zero, least outputs.
pub fn zero_element<C: Count>(ty: &ValueType) -> SemFun<C> {
    let (input, output) = arrow_parts(ty);
    SemFun::new(ty.clone(), move |mut mem| {
        mem.drop_top(&input)?;
        mem.extend(SemMem::zero(&output));
        Ok((C::zero(), mem))
    })
}

/// The interpretation of a memory: one functional per slot, bottom first.
pub struct SemMem<C: Count> {
    stacks: BTreeMap<Location, Vec<SemFun<C>>>,
}

impl<C: Count> Clone for SemMem<C> {
    fn clone(&self) -> Self {
        SemMem {
            stacks: self.stacks.clone(),
        }
    }
}

impl<C: Count> Default for SemMem<C> {
    fn default() -> Self {
        SemMem::new()
    }
}

impl<C: Count> fmt::Debug for SemMem<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.stacks.iter()).finish()
    }
}

impl<C: Count> SemMem<C> {
    pub fn new() -> SemMem<C> {
        SemMem {
            stacks: BTreeMap::new(),
        }
    }

    /// Zero elements in every slot of `t`.
    pub fn zero(t: &MemoryType) -> SemMem<C> {
        let mut m = SemMem::new();
        for (loc, s) in t.iter() {
            for ty in &s.0 {
                m.push(loc, zero_element(ty));
            }
        }
        m
    }

    pub fn from_stacks<I: IntoIterator<Item = (Location, Vec<SemFun<C>>)>>(stacks: I) -> SemMem<C> {
        let mut m = SemMem::new();
        for (loc, s) in stacks {
            for f in s {
                m.push(&loc, f);
            }
        }
        m
    }

    pub fn push(&mut self, loc: &Location, f: SemFun<C>) {
        self.stacks.entry(loc.clone()).or_default().push(f);
    }

    pub fn pop(&mut self, loc: &Location) -> Result<SemFun<C>, MeasureError> {
        let s = self.stacks.get_mut(loc);
        let f = s
            .and_then(|s| s.pop())
            .ok_or_else(|| MeasureError::DerivationMismatch(format!("empty stack at {loc}")))?;
        if self.stacks.get(loc).is_some_and(Vec::is_empty) {
            self.stacks.remove(loc);
        }
        Ok(f)
    }

    pub fn stack(&self, loc: &Location) -> &[SemFun<C>] {
        self.stacks.get(loc).map_or(&[], Vec::as_slice)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Location, &[SemFun<C>])> {
        self.stacks.iter().map(|(l, s)| (l, s.as_slice()))
    }

    pub fn depth(&self) -> usize {
        self.stacks.values().map(Vec::len).sum()
    }

    /// The memory type given by the tags.
    pub fn shape(&self) -> MemoryType {
        MemoryType::from_stacks(
            self.iter()
                .map(|(l, s)| (l.clone(), s.iter().map(|f| f.ty().clone()).collect())),
        )
    }

    /// Collapses of all slots, in location order, bottom first.
    pub fn profile(&self) -> Result<Vec<C>, MeasureError> {
        self.stacks.values().flatten().map(SemFun::collapse).collect()
    }

    /// Remove as many items from the top of each stack as `t` has.
    pub fn drop_top(&mut self, t: &MemoryType) -> Result<(), MeasureError> {
        for (loc, s) in t.iter() {
            for _ in 0..s.len() {
                self.pop(loc)?;
            }
        }
        Ok(())
    }

    /// Push every item of `top`, bottom first.
    pub fn extend(&mut self, top: SemMem<C>) {
        for (loc, s) in top.stacks {
            self.stacks.entry(loc).or_default().extend(s);
        }
    }
}
