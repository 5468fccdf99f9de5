//! Typed AST for the four planning file formats and the shared state
//! representation (closed world: an atom absent from a state is false).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Root of the type hierarchy; every declared type descends from it.
pub const OBJECT_TYPE: &str = "object";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ObjectKind {
    /// Declared in the problem's `:objects` block.
    PddlObject,
    /// Created during stream planning (or pre-seeded by a domain's
    /// initial geometric state); carries a globally unique name.
    StreamObject,
}

/// A concrete object: a PDDL object or a stream object.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ObjectRef {
    pub name: String,
    pub kind: ObjectKind,
    pub type_name: String,
}

impl ObjectRef {
    pub fn pddl(name: impl Into<String>, type_name: impl Into<String>) -> Self {
        ObjectRef { name: name.into(), kind: ObjectKind::PddlObject, type_name: type_name.into() }
    }
}

impl fmt::Display for ObjectRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// Argument position in a formula: a `?variable` or a constant name.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(String),
    Const(String),
}

impl Term {
    pub fn as_const(&self) -> Option<&str> {
        match self {
            Term::Const(n) => Some(n),
            Term::Var(_) => None,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v),
            Term::Const(c) => f.write_str(c),
        }
    }
}

/// Ground atom: predicate applied to object names.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub pred: String,
    pub args: Vec<String>,
}

impl Atom {
    pub fn new(pred: impl Into<String>, args: Vec<String>) -> Self {
        Atom { pred: pred.into(), args }
    }

    pub fn ground(pred: &str, args: &[&str]) -> Self {
        Atom { pred: pred.to_string(), args: args.iter().map(|s| s.to_string()).collect() }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.pred)?;
        for a in &self.args {
            write!(f, " {}", a)?;
        }
        write!(f, ")")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TypedVar {
    pub name: String,
    pub type_name: String,
}

impl TypedVar {
    pub fn new(name: impl Into<String>, type_name: impl Into<String>) -> Self {
        TypedVar { name: name.into(), type_name: type_name.into() }
    }
}

/// Recursive logical expression shared by the symbolic and geometric layers.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Atom(String, Vec<Term>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Not(Box<Formula>),
    Forall(Vec<TypedVar>, Box<Formula>),
    When(Box<Formula>, Box<Formula>),
    Equal(Term, Term),
}

impl Formula {
    pub fn atom(pred: &str, args: Vec<Term>) -> Self {
        Formula::Atom(pred.to_string(), args)
    }

    /// The trivially true formula.
    pub fn truth() -> Self {
        Formula::And(Vec::new())
    }

    /// Ground atom view; `None` when any argument is a variable.
    pub fn as_ground_atom(&self) -> Option<Atom> {
        match self {
            Formula::Atom(pred, args) => {
                let mut names = Vec::with_capacity(args.len());
                for a in args {
                    names.push(a.as_const()?.to_string());
                }
                Some(Atom { pred: pred.clone(), args: names })
            }
            _ => None,
        }
    }

    /// Visit every atom (predicate, arity) use in the formula.
    pub fn visit_atoms<'a>(&'a self, f: &mut impl FnMut(&'a str, &'a [Term])) {
        match self {
            Formula::Atom(pred, args) => f(pred, args),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|x| x.visit_atoms(f)),
            Formula::Not(x) => x.visit_atoms(f),
            Formula::Forall(_, x) => x.visit_atoms(f),
            Formula::When(c, e) => {
                c.visit_atoms(f);
                e.visit_atoms(f);
            }
            Formula::Equal(..) => {}
        }
    }

    pub fn contains_when(&self) -> bool {
        match self {
            Formula::When(..) => true,
            Formula::And(fs) | Formula::Or(fs) => fs.iter().any(Formula::contains_when),
            Formula::Not(x) | Formula::Forall(_, x) => x.contains_when(),
            Formula::Atom(..) | Formula::Equal(..) => false,
        }
    }

    /// Free variables (not captured by an enclosing `forall`).
    pub fn free_vars(&self) -> BTreeSet<String> {
        fn walk(f: &Formula, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
            match f {
                Formula::Atom(_, args) => {
                    for t in args {
                        if let Term::Var(v) = t {
                            if !bound.iter().any(|b| b == v) {
                                out.insert(v.clone());
                            }
                        }
                    }
                }
                Formula::Equal(a, b) => {
                    for t in [a, b] {
                        if let Term::Var(v) = t {
                            if !bound.iter().any(|b2| b2 == v) {
                                out.insert(v.clone());
                            }
                        }
                    }
                }
                Formula::And(fs) | Formula::Or(fs) => {
                    fs.iter().for_each(|x| walk(x, bound, out))
                }
                Formula::Not(x) => walk(x, bound, out),
                Formula::When(c, e) => {
                    walk(c, bound, out);
                    walk(e, bound, out);
                }
                Formula::Forall(vars, x) => {
                    let n = bound.len();
                    bound.extend(vars.iter().map(|v| v.name.clone()));
                    walk(x, bound, out);
                    bound.truncate(n);
                }
            }
        }
        let mut out = BTreeSet::new();
        walk(self, &mut Vec::new(), &mut out);
        out
    }

    /// Substitute variables by constant names (capture-aware).
    pub fn substitute(&self, subst: &BTreeMap<String, String>) -> Formula {
        fn term(t: &Term, subst: &BTreeMap<String, String>) -> Term {
            match t {
                Term::Var(v) => match subst.get(v) {
                    Some(c) => Term::Const(c.clone()),
                    None => t.clone(),
                },
                Term::Const(_) => t.clone(),
            }
        }
        match self {
            Formula::Atom(p, args) => {
                Formula::Atom(p.clone(), args.iter().map(|t| term(t, subst)).collect())
            }
            Formula::Equal(a, b) => Formula::Equal(term(a, subst), term(b, subst)),
            Formula::And(fs) => Formula::And(fs.iter().map(|f| f.substitute(subst)).collect()),
            Formula::Or(fs) => Formula::Or(fs.iter().map(|f| f.substitute(subst)).collect()),
            Formula::Not(x) => Formula::Not(Box::new(x.substitute(subst))),
            Formula::When(c, e) => Formula::When(
                Box::new(c.substitute(subst)),
                Box::new(e.substitute(subst)),
            ),
            Formula::Forall(vars, x) => {
                // Inner quantifier shadows outer substitution.
                let mut inner = subst.clone();
                for v in vars {
                    inner.remove(&v.name);
                }
                Formula::Forall(vars.clone(), Box::new(x.substitute(&inner)))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredicateDef {
    pub name: String,
    pub params: Vec<TypedVar>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionSchema {
    pub name: String,
    pub parameters: Vec<TypedVar>,
    pub precondition: Formula,
    pub effect: Formula,
}

/// Type hierarchy with `object` as the implicit root.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TypeHierarchy {
    /// type name -> parent type name; `object` itself is absent.
    parent: BTreeMap<String, String>,
}

impl TypeHierarchy {
    pub fn declare(&mut self, name: &str, parent: &str) {
        if name != OBJECT_TYPE {
            self.parent.insert(name.to_string(), parent.to_string());
        }
    }

    pub fn contains(&self, name: &str) -> bool {
        name == OBJECT_TYPE || self.parent.contains_key(name)
    }

    /// True when `child` equals `ancestor` or descends from it.
    pub fn is_subtype(&self, child: &str, ancestor: &str) -> bool {
        if ancestor == OBJECT_TYPE || child == ancestor {
            return true;
        }
        let mut cur = child;
        while let Some(p) = self.parent.get(cur) {
            if p == ancestor {
                return true;
            }
            cur = p;
        }
        false
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.parent.keys().map(String::as_str)
    }

    pub fn parent_of(&self, name: &str) -> Option<&str> {
        self.parent.get(name).map(String::as_str)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Domain {
    pub name: String,
    pub types: TypeHierarchy,
    pub predicates: Vec<PredicateDef>,
    pub actions: Vec<ActionSchema>,
}

impl Domain {
    pub fn predicate(&self, name: &str) -> Option<&PredicateDef> {
        self.predicates.iter().find(|p| p.name == name)
    }

    pub fn action(&self, name: &str) -> Option<&ActionSchema> {
        self.actions.iter().find(|a| a.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Problem {
    pub name: String,
    pub domain_name: String,
    pub objects: Vec<ObjectRef>,
    pub init: State,
    pub goal: Formula,
}

impl Problem {
    pub fn object(&self, name: &str) -> Option<&ObjectRef> {
        self.objects.iter().find(|o| o.name == name)
    }
}

/// Stream declaration: the certified-fact signature is
/// `(name, inputs ++ outputs)` — exactly one certified fact per stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StreamDef {
    pub name: String,
    pub inputs: Vec<TypedVar>,
    pub outputs: Vec<TypedVar>,
    /// Effect compiled into the task domain when a collision-style
    /// instance of this stream fails.
    pub fail_effect: Option<Formula>,
    /// Optional instantiation guard (conjunction of facts over the
    /// inputs); used by optimistic object creation, ignored by the
    /// direct stream planner.
    pub domain_cond: Option<Formula>,
}

impl StreamDef {
    pub fn arity(&self) -> usize {
        self.inputs.len() + self.outputs.len()
    }
}

/// Geometric counterpart of an action schema.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeomActionDef {
    pub name: String,
    pub parameters: Vec<TypedVar>,
    pub inputs: Vec<TypedVar>,
    pub outputs: Vec<TypedVar>,
    pub geom_precondition: Formula,
    pub geom_effect: Formula,
}

impl GeomActionDef {
    /// A definition with no geometric content, for purely symbolic actions.
    pub fn empty(name: &str, parameters: Vec<TypedVar>) -> Self {
        GeomActionDef {
            name: name.to_string(),
            parameters,
            inputs: Vec::new(),
            outputs: Vec::new(),
            geom_precondition: Formula::truth(),
            geom_effect: Formula::truth(),
        }
    }
}

/// Set of ground atoms under the closed-world assumption.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct State {
    atoms: BTreeSet<Atom>,
}

impl State {
    pub fn new() -> Self {
        State::default()
    }

    pub fn from_atoms(atoms: impl IntoIterator<Item = Atom>) -> Self {
        State { atoms: atoms.into_iter().collect() }
    }

    pub fn holds(&self, atom: &Atom) -> bool {
        self.atoms.contains(atom)
    }

    pub fn insert(&mut self, atom: Atom) {
        self.atoms.insert(atom);
    }

    pub fn remove(&mut self, atom: &Atom) {
        self.atoms.remove(atom);
    }

    pub fn iter(&self) -> impl Iterator<Item = &Atom> {
        self.atoms.iter()
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }
}

impl FromIterator<Atom> for State {
    fn from_iter<T: IntoIterator<Item = Atom>>(iter: T) -> Self {
        State { atoms: iter.into_iter().collect() }
    }
}

impl fmt::Display for State {
    fmt_state!();
}

macro_rules! fmt_state {
    () => {
        fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            let mut first = true;
            for a in &self.atoms {
                if !first {
                    write!(f, " ")?;
                }
                write!(f, "{}", a)?;
                first = false;
            }
            Ok(())
        }
    };
}
use fmt_state;

/// Typed object universe used for quantifier expansion: the problem's
/// objects plus any live stream objects.
#[derive(Debug, Clone, Default)]
pub struct Universe {
    objects: Vec<ObjectRef>,
    by_name: BTreeMap<String, usize>,
}

impl Universe {
    pub fn new() -> Self {
        Universe::default()
    }

    pub fn from_objects(objects: impl IntoIterator<Item = ObjectRef>) -> Self {
        let mut u = Universe::new();
        for o in objects {
            u.add(o);
        }
        u
    }

    pub fn add(&mut self, obj: ObjectRef) {
        if !self.by_name.contains_key(&obj.name) {
            self.by_name.insert(obj.name.clone(), self.objects.len());
            self.objects.push(obj);
        }
    }

    pub fn get(&self, name: &str) -> Option<&ObjectRef> {
        self.by_name.get(name).map(|&i| &self.objects[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = &ObjectRef> {
        self.objects.iter()
    }

    /// Objects whose type equals or descends from `type_name`,
    /// in creation order.
    pub fn of_type<'a>(
        &'a self,
        type_name: &'a str,
        types: &'a TypeHierarchy,
    ) -> impl Iterator<Item = &'a ObjectRef> {
        self.objects.iter().filter(move |o| types.is_subtype(&o.type_name, type_name))
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }
}

/// Fresh-name source for stream objects. Names are `<type>_<counter>`;
/// the counter is never reused within a planning episode, which is what
/// guarantees output freshness across stream plans.
#[derive(Debug, Clone, Default)]
pub struct ObjectFactory {
    counter: u64,
    created: Vec<ObjectRef>,
    index: BTreeMap<String, usize>,
}

impl ObjectFactory {
    pub fn new() -> Self {
        ObjectFactory::default()
    }

    pub fn fresh(&mut self, type_name: &str) -> ObjectRef {
        let name = format!("{}_{}", type_name, self.counter);
        self.counter += 1;
        let obj = ObjectRef {
            name: name.clone(),
            kind: ObjectKind::StreamObject,
            type_name: type_name.to_string(),
        };
        self.index.insert(name, self.created.len());
        self.created.push(obj.clone());
        obj
    }

    pub fn get(&self, name: &str) -> Option<&ObjectRef> {
        self.index.get(name).map(|&i| &self.created[i])
    }

    /// Position in creation order; used to break grounding ties.
    pub fn creation_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn created(&self) -> &[ObjectRef] {
        &self.created
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subtype_chain() {
        let mut t = TypeHierarchy::default();
        t.declare("slot", OBJECT_TYPE);
        t.declare("sink-slot", "slot");
        assert!(t.is_subtype("sink-slot", "slot"));
        assert!(t.is_subtype("sink-slot", OBJECT_TYPE));
        assert!(!t.is_subtype("slot", "sink-slot"));
    }

    #[test]
    fn substitution_respects_quantifier_shadowing() {
        let f = Formula::Forall(
            vec![TypedVar::new("?x", "obj")],
            Box::new(Formula::atom("p", vec![Term::Var("?x".into()), Term::Var("?y".into())])),
        );
        let mut s = BTreeMap::new();
        s.insert("?x".to_string(), "a".to_string());
        s.insert("?y".to_string(), "b".to_string());
        let g = f.substitute(&s);
        match g {
            Formula::Forall(_, body) => match *body {
                Formula::Atom(_, args) => {
                    assert_eq!(args[0], Term::Var("?x".into()));
                    assert_eq!(args[1], Term::Const("b".into()));
                }
                _ => panic!("expected atom"),
            },
            _ => panic!("expected forall"),
        }
    }

    #[test]
    fn factory_names_are_unique_and_indexed() {
        let mut f = ObjectFactory::new();
        let a = f.fresh("pose");
        let b = f.fresh("pose");
        assert_ne!(a.name, b.name);
        assert_eq!(f.creation_index(&a.name), Some(0));
        assert_eq!(f.creation_index(&b.name), Some(1));
    }
}
