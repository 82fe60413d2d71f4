//! Built-in tree maps used throughout the tests, the examples and the CLI.

use crate::scalar::Scalar;
use crate::tree::{MarkedTreeMap, Tag, TreeMapBuilder};

/// The tree map of the degree-3 Persian-carpet example.
///
/// Star tree with centre `b` (JULIA) and leaves `a0..a3` (FATOU); edge
/// `e_i = [a_i, b]`. Only `e0` is subdivided: `a0 < b-1 < a'0 < b`, with
/// marks at 1/3 and 2/3. Vertex dynamics `a0 → a3 → a1 → a2 → a0`, `b` fixed,
/// `a'0 ↦ a1`, `b-1 ↦ b`; weights `(1, 1, 1; 2; 2; 1)`.
pub fn persian_carpet<S: Scalar>() -> MarkedTreeMap<S> {
    persian_carpet_with_marks(S::ratio(1, 3), S::ratio(2, 3))
}

/// Persian carpet with the two marks of `e0` placed at `first < second`.
pub fn persian_carpet_with_marks<S: Scalar>(first: S, second: S) -> MarkedTreeMap<S> {
    let w = |n| S::from_int(n);
    TreeMapBuilder::new()
        .vertex("a0", Tag::Fatou)
        .vertex("a1", Tag::Fatou)
        .vertex("a2", Tag::Fatou)
        .vertex("a3", Tag::Fatou)
        .vertex("b", Tag::Julia)
        .edge("a0", "b")
        .edge("a1", "b")
        .edge("a2", "b")
        .edge("a3", "b")
        .mark(0, first, "b-1", "b")
        .mark(0, second, "a'0", "a1")
        .image("a0", "a3")
        .image("a3", "a1")
        .image("a1", "a2")
        .image("a2", "a0")
        .image("b", "b")
        .weights(0, vec![w(1), w(1), w(1)])
        .weights(1, vec![w(2)])
        .weights(2, vec![w(2)])
        .weights(3, vec![w(1)])
        .build()
        .expect("persian carpet fixture is valid")
}

/// The single-edge toy: `[a, b]` with `b-1 = 1/3`, `a-1 = 2/3`,
/// `a ↦ a`, `b-1 ↦ b`, `a-1 ↦ a`, `b ↦ b`, all weights 1. Untagged.
pub fn fig2_toy<S: Scalar>() -> MarkedTreeMap<S> {
    fig2_toy_tagged(Tag::Untagged)
}

/// The toy with both vertices carrying `tag`.
pub fn fig2_toy_tagged<S: Scalar>(tag: Tag) -> MarkedTreeMap<S> {
    TreeMapBuilder::new()
        .vertex("a", tag)
        .vertex("b", tag)
        .edge("a", "b")
        .mark(0, S::ratio(1, 3), "b-1", "b")
        .mark(0, S::ratio(2, 3), "a-1", "a")
        .image("a", "a")
        .image("b", "b")
        .build()
        .expect("toy fixture is valid")
}

/// Single edge `[a, b]`, fixed endpoints, one segment of the given weight.
pub fn identity_edge<S: Scalar>(weight: S) -> MarkedTreeMap<S> {
    TreeMapBuilder::new()
        .vertex("a", Tag::Fatou)
        .vertex("b", Tag::Fatou)
        .edge("a", "b")
        .image("a", "a")
        .image("b", "b")
        .weights(0, vec![weight])
        .build()
        .expect("identity fixture is valid")
}

/// Path `a – m – b` with the two edges exchanged isometrically.
pub fn edge_swap<S: Scalar>() -> MarkedTreeMap<S> {
    TreeMapBuilder::new()
        .vertex("a", Tag::Fatou)
        .vertex("m", Tag::Julia)
        .vertex("b", Tag::Fatou)
        .edge("a", "m")
        .edge("m", "b")
        .image("a", "b")
        .image("m", "m")
        .image("b", "a")
        .build()
        .expect("swap fixture is valid")
}
