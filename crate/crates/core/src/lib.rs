pub mod acceptance;
pub mod exactla;
pub mod families;
pub mod fingcoh;
pub mod morita;
pub mod nilq;
pub mod stablegraph;
pub mod surfcoh;
pub mod surfhom;
