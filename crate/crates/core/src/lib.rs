pub mod automata;
pub mod bench;
pub mod encoding;
pub mod ltl;
pub mod specfile;
pub mod synth;
pub mod ts;
