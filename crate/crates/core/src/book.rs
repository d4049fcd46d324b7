// Chapters of the guide under `book/src`, compiled as doctests so the
// snippets stay in sync with the library.

#[doc = include_str!("../../../book/src/introduction.md")]
mod introduction {}
#[doc = include_str!("../../../book/src/kernels.md")]
mod kernels {}
#[doc = include_str!("../../../book/src/models.md")]
mod models {}
#[doc = include_str!("../../../book/src/spoofing.md")]
mod spoofing {}
#[doc = include_str!("../../../book/src/metrics.md")]
mod metrics {}
#[doc = include_str!("../../../book/src/theory.md")]
mod theory {}
