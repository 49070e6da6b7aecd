use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::exactlin::{scalar, Scalar};

use super::{add_term, HVector, Letter, LieMonomial, Word, WordComb};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Label {
    Vector(HVector),
    /// An abstract hair index, written `#k`.
    Hair(usize),
}

impl Label {
    pub fn letter(l: Letter) -> Self {
        Label::Vector(HVector::letter(l))
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Vector(v) => match v.as_letter() {
                Some(l) => write!(f, "{l}"),
                None => write!(f, "{v}"),
            },
            Label::Hair(k) => write!(f, "#{k}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Node {
    Leaf { label: Label, nbr: usize },
    Inner { nbrs: [usize; 3] },
}

/// Rooted binary tree; a node with children (A,B) has cyclic order
/// (parent, A, B) once attached.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rooted {
    Leaf(Label),
    Node(Box<Rooted>, Box<Rooted>),
}

impl Rooted {
    pub fn node(a: Rooted, b: Rooted) -> Self {
        Rooted::Node(Box::new(a), Box::new(b))
    }

    pub fn from_lie(m: &LieMonomial) -> Self {
        match m {
            LieMonomial::Letter(l) => Rooted::Leaf(Label::letter(*l)),
            LieMonomial::Bracket(a, b) => Rooted::node(Rooted::from_lie(a), Rooted::from_lie(b)),
        }
    }
}

/// A unitrivalent tree with cyclic orders at trivalent vertices, stored as
/// an arena of nodes with neighbor indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tree {
    nodes: Vec<Node>,
}

impl Tree {
    pub fn tripod(a: Label, b: Label, c: Label) -> Self {
        Self::from_triple(Rooted::Leaf(a), Rooted::Leaf(b), Rooted::Leaf(c))
    }

    pub fn letter_tripod(a: Letter, b: Letter, c: Letter) -> Self {
        Self::tripod(Label::letter(a), Label::letter(b), Label::letter(c))
    }

    /// A central vertex with cyclic order (A,B,C).
    pub fn from_triple(a: Rooted, b: Rooted, c: Rooted) -> Self {
        let mut nodes = vec![Node::Inner { nbrs: [0; 3] }];
        let mut nbrs = [0; 3];
        for (i, sub) in [a, b, c].into_iter().enumerate() {
            nbrs[i] = attach(&mut nodes, sub, 0);
        }
        nodes[0] = Node::Inner { nbrs };
        Tree { nodes }
    }

    /// A leaf labeled `root` attached to the top of `sub`.
    pub fn from_rooted(root: Label, sub: Rooted) -> Result<Self> {
        let Rooted::Node(a, b) = sub else {
            return Err(Error::OutOfRange("a tree needs at least one trivalent vertex".into()));
        };
        Ok(Self::from_triple(Rooted::Leaf(root), *a, *b))
    }

    pub fn order(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Inner { .. })).count()
    }

    pub fn leaves(&self) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&i| matches!(self.nodes[i], Node::Leaf { .. })).collect()
    }

    pub fn inner_vertices(&self) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&i| matches!(self.nodes[i], Node::Inner { .. })).collect()
    }

    pub fn label(&self, leaf: usize) -> &Label {
        match &self.nodes[leaf] {
            Node::Leaf { label, .. } => label,
            Node::Inner { .. } => panic!("node {leaf} is not a leaf"),
        }
    }

    pub fn set_label(&mut self, leaf: usize, new: Label) {
        match &mut self.nodes[leaf] {
            Node::Leaf { label, .. } => *label = new,
            Node::Inner { .. } => panic!("node {leaf} is not a leaf"),
        }
    }

    pub fn relabel<F: FnMut(usize, &Label) -> Label>(&self, mut f: F) -> Tree {
        let mut t = self.clone();
        for (i, leaf) in self.leaves().into_iter().enumerate() {
            let new = f(i, self.label(leaf));
            t.set_label(leaf, new);
        }
        t
    }

    /// The vector label of a leaf; abstract indices are an error.
    pub fn vector(&self, leaf: usize) -> Result<&HVector> {
        match self.label(leaf) {
            Label::Vector(v) => Ok(v),
            Label::Hair(_) => Err(Error::UnlabeledLeaf(leaf)),
        }
    }

    /// Swaps two edges at an inner vertex; by AS this negates the tree.
    pub fn flip_at(&self, vertex: usize) -> Tree {
        let mut t = self.clone();
        if let Node::Inner { nbrs } = &mut t.nodes[vertex] {
            nbrs.swap(1, 2);
        }
        t
    }

    fn rotated(&self, v: usize, from: usize) -> [usize; 3] {
        let Node::Inner { nbrs } = self.nodes[v] else {
            panic!("node {v} is not inner")
        };
        let k = nbrs.iter().position(|&x| x == from).expect("adjacent");
        [nbrs[k], nbrs[(k + 1) % 3], nbrs[(k + 2) % 3]]
    }

    /// Lie expansion of the part of the tree hanging from `node`, entered
    /// from `from`, as signed sequences of leaf indices.
    fn expand_from(&self, node: usize, from: usize) -> Vec<(Vec<usize>, i64)> {
        match &self.nodes[node] {
            Node::Leaf { .. } => vec![(vec![node], 1)],
            Node::Inner { .. } => {
                let [_, a, b] = self.rotated(node, from);
                let ea = self.expand_from(a, node);
                let eb = self.expand_from(b, node);
                let mut out = Vec::with_capacity(2 * ea.len() * eb.len());
                for (u, c) in &ea {
                    for (v, d) in &eb {
                        let mut w = u.clone();
                        w.extend_from_slice(v);
                        out.push((w, c * d));
                    }
                }
                for (v, d) in &eb {
                    for (u, c) in &ea {
                        let mut w = v.clone();
                        w.extend_from_slice(u);
                        out.push((w, -c * d));
                    }
                }
                out
            }
        }
    }

    /// The Lie element t_x obtained by rooting at leaf `x`, over leaf indices.
    pub fn rooted_expansion(&self, x: usize) -> Vec<(Vec<usize>, i64)> {
        let Node::Leaf { nbr, .. } = self.nodes[x] else {
            panic!("node {x} is not a leaf")
        };
        self.expand_from(nbr, x)
    }

    /// Multilinear substitution of leaf labels into a sequence of leaves.
    pub fn substitute(&self, leaves: &[usize]) -> Result<Vec<(Word, Scalar)>> {
        let mut acc: Vec<(Word, Scalar)> = vec![(Vec::new(), scalar(1))];
        for &leaf in leaves {
            let v = self.vector(leaf)?;
            let mut next = Vec::with_capacity(acc.len() * v.terms().len());
            for (w, c) in &acc {
                for (l, d) in v.terms() {
                    let mut w2 = w.clone();
                    w2.push(*l);
                    next.push((w2, c * d));
                }
            }
            acc = next;
        }
        Ok(acc)
    }

    /// Substituted Lie expansion rooted at `x`.
    pub fn rooted_words(&self, x: usize) -> Result<WordComb> {
        let mut out = WordComb::new();
        for (ids, c) in self.rooted_expansion(x) {
            for (w, d) in self.substitute(&ids)? {
                add_term(&mut out, w, d * scalar(c));
            }
        }
        Ok(out)
    }

    pub fn neighbor(&self, leaf: usize) -> usize {
        match self.nodes[leaf] {
            Node::Leaf { nbr, .. } => nbr,
            Node::Inner { .. } => panic!("node {leaf} is not a leaf"),
        }
    }

    /// Removes leaf `x` of `self` and leaf `y` of `other` and joins their
    /// neighbors by an edge, keeping every cyclic order in place.
    pub fn join(&self, x: usize, other: &Tree, y: usize) -> Tree {
        let off = self.nodes.len();
        let mut nodes = self.nodes.clone();
        for n in &other.nodes {
            nodes.push(match n {
                Node::Leaf { label, nbr } => Node::Leaf { label: label.clone(), nbr: nbr + off },
                Node::Inner { nbrs } => Node::Inner { nbrs: nbrs.map(|k| k + off) },
            });
        }
        let (y, u, w) = (y + off, self.neighbor(x), other.neighbor(y) + off);
        for (v, old, new) in [(u, x, w), (w, y, u)] {
            match &mut nodes[v] {
                Node::Inner { nbrs } => {
                    for k in nbrs.iter_mut() {
                        if *k == old {
                            *k = new;
                        }
                    }
                }
                Node::Leaf { nbr, .. } => *nbr = new,
            }
        }
        compact(nodes, &[x, y])
    }

    /// Random tree shape with `order` trivalent vertices and leaves labeled
    /// `#0..#(order+1)` in arena order.
    pub fn random_shape<R: Rng>(order: usize, rng: &mut R) -> Result<Tree> {
        if order == 0 {
            return Err(Error::OutOfRange("a tree needs at least one trivalent vertex".into()));
        }
        let mut t = Tree::tripod(Label::Hair(0), Label::Hair(0), Label::Hair(0));
        for _ in 1..order {
            let x = *t.leaves().choose(rng).expect("tree has leaves");
            // the leaf x becomes a trivalent vertex with two new leaves
            let parent = t.neighbor(x);
            let (a, b) = (t.nodes.len(), t.nodes.len() + 1);
            let nbrs = if rng.gen_bool(0.5) { [parent, a, b] } else { [parent, b, a] };
            t.nodes[x] = Node::Inner { nbrs };
            t.nodes.push(Node::Leaf { label: Label::Hair(0), nbr: x });
            t.nodes.push(Node::Leaf { label: Label::Hair(0), nbr: x });
        }
        Ok(t.relabel(|i, _| Label::Hair(i)))
    }

    /// Random tree with uniformly chosen basis-letter labels of genus `g`.
    pub fn random_letters<R: Rng>(order: usize, genus: usize, rng: &mut R) -> Result<Tree> {
        let shape = Self::random_shape(order, rng)?;
        Ok(shape.relabel(|_, _| Label::letter(Letter::from_code(rng.gen_range(0..2 * genus as u16)))))
    }

    pub fn parse(src: &str) -> Result<Tree> {
        let mut p = Parser { src: src.as_bytes(), pos: 0 };
        p.skip_ws();
        p.expect(b'(')?;
        let a = p.sub()?;
        p.expect(b',')?;
        let b = p.sub()?;
        p.expect(b',')?;
        let c = p.sub()?;
        p.expect(b')')?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.error("trailing input"));
        }
        Ok(Tree::from_triple(a, b, c))
    }

    fn fmt_sub(&self, node: usize, from: usize, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.nodes[node] {
            Node::Leaf { label, .. } => write!(f, "{label}"),
            Node::Inner { .. } => {
                let [_, a, b] = self.rotated(node, from);
                write!(f, "(")?;
                self.fmt_sub(a, node, f)?;
                write!(f, ",")?;
                self.fmt_sub(b, node, f)?;
                write!(f, ")")
            }
        }
    }
}

fn attach(nodes: &mut Vec<Node>, sub: Rooted, parent: usize) -> usize {
    let id = nodes.len();
    match sub {
        Rooted::Leaf(label) => nodes.push(Node::Leaf { label, nbr: parent }),
        Rooted::Node(a, b) => {
            nodes.push(Node::Inner { nbrs: [parent, 0, 0] });
            let ia = attach(nodes, *a, id);
            let ib = attach(nodes, *b, id);
            nodes[id] = Node::Inner { nbrs: [parent, ia, ib] };
        }
    }
    id
}

fn compact(nodes: Vec<Node>, removed: &[usize]) -> Tree {
    let mut map = vec![usize::MAX; nodes.len()];
    let mut k = 0;
    for (i, m) in map.iter_mut().enumerate() {
        if !removed.contains(&i) {
            *m = k;
            k += 1;
        }
    }
    let nodes = nodes
        .into_iter()
        .enumerate()
        .filter(|(i, _)| !removed.contains(i))
        .map(|(_, n)| match n {
            Node::Leaf { label, nbr } => Node::Leaf { label, nbr: map[nbr] },
            Node::Inner { nbrs } => Node::Inner { nbrs: nbrs.map(|x| map[x]) },
        })
        .collect();
    Tree { nodes }
}

/// Prints the tree around its first trivalent vertex; basis letters and
/// abstract indices round-trip through [`Tree::parse`].
impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let Some(v) = self.inner_vertices().first().copied() else {
            return write!(f, "()");
        };
        let Node::Inner { nbrs } = self.nodes[v] else { unreachable!() };
        write!(f, "(")?;
        for (i, n) in nbrs.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            self.fmt_sub(*n, v, f)?;
        }
        write!(f, ")")
    }
}

impl std::str::FromStr for Tree {
    type Err = Error;
    fn from_str(s: &str) -> Result<Tree> {
        Tree::parse(s)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> Error {
        Error::Parse { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        self.skip_ws();
        if self.src.get(self.pos) == Some(&c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected '{}'", c as char)))
        }
    }

    fn number(&mut self) -> Result<usize> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        digits.parse().map_err(|_| Error::Parse { pos: start, msg: "expected a number".into() })
    }

    fn sub(&mut self) -> Result<Rooted> {
        self.skip_ws();
        let start = self.pos;
        match self.src.get(self.pos) {
            Some(b'(') => {
                self.pos += 1;
                let a = self.sub()?;
                self.expect(b',')?;
                let b = self.sub()?;
                self.skip_ws();
                if self.src.get(self.pos) == Some(&b',') {
                    return Err(self.error("nested vertices take two subtrees; the parent edge is implicit"));
                }
                self.expect(b')')?;
                Ok(Rooted::node(a, b))
            }
            Some(b'#') => {
                self.pos += 1;
                Ok(Rooted::Leaf(Label::Hair(self.number()?)))
            }
            Some(c @ (b'p' | b'q')) => {
                let is_p = *c == b'p';
                self.pos += 1;
                let i = self.number()?;
                if i == 0 || i > 1 << 14 {
                    return Err(Error::Parse { pos: start, msg: "letter index must be in 1..=16384".into() });
                }
                let l = if is_p { Letter::p(i) } else { Letter::q(i) };
                Ok(Rooted::Leaf(Label::letter(l)))
            }
            Some(b'0') => {
                self.pos += 1;
                Ok(Rooted::Leaf(Label::Vector(HVector::zero())))
            }
            _ => Err(self.error("expected a leaf (p<i>, q<i>, #<k>, 0) or '('")),
        }
    }
}
