//! Shared inputs for the fkdet benchmarks.

use fkdet::{parse_ring_element, RingElement};

/// `3 + u + u⁻¹` over `Z`.
pub fn z_example() -> RingElement {
    parse_ring_element("group Z^1\n3 0\n1 1\n1 -1\n").expect("valid element")
}

/// `5 + x + x⁻¹ + y + y⁻¹` over `Z²`.
pub fn z2_example() -> RingElement {
    parse_ring_element("group Z^2\n5 0 0\n1 1 0\n1 -1 0\n1 0 1\n1 0 -1\n").expect("valid element")
}

/// `5 + a + a⁻¹ + b + b⁻¹` over the discrete Heisenberg group.
pub fn h3_example() -> RingElement {
    parse_ring_element("group H3\n5 0 0 0\n1 1 0 0\n1 -1 0 0\n1 0 1 0\n1 0 -1 0\n").expect("valid element")
}
