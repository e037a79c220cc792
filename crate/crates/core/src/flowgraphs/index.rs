use crate::engine::{Direction, PostContext};
use crate::graph::Value;
use crate::rules::Domain;

use super::cfg::statement_order;

/// Give each statement the application produced its document-order `index`.
///
/// The whole flow graph exists when this runs, so the position is read off the
/// flow statement order rather than the partially built AST.
pub fn set_index(ctx: &mut PostContext<'_>, direction: Direction) -> Result<(), String> {
    if direction == Direction::Forward {
        return Ok(());
    }
    let order = statement_order(&ctx.triple().target);
    for stmt in ctx.writable_nodes(Domain::Source) {
        let ast = &ctx.triple().source;
        let ty = ast.node_type(stmt).unwrap_or_default();
        if !ast.metamodel().is_subtype(ty, "Stmt") {
            continue;
        }
        let flow = ctx
            .triple()
            .corrs_from_source(stmt)
            .into_iter()
            .find(|c| c.ty == "AstToFlow")
            .map(|c| c.target)
            .ok_or_else(|| format!("{stmt} has no flow counterpart"))?;
        let index = order
            .iter()
            .position(|&n| n == flow)
            .ok_or_else(|| format!("{flow} is not a statement of any method"))?;
        ctx.set_attr(Domain::Source, stmt, "index", Value::Int(index as i64))?;
    }
    Ok(())
}
