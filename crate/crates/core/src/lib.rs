pub mod syntax;
pub mod theory;
pub mod extraction;
pub mod tableau;
pub mod search;
pub mod isogen;
