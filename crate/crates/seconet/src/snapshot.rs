//! Plain-CSV exports of a network snapshot: the active edge list and
//! the person table. Both are written in deterministic order (edges by
//! creation, persons by id) so identical runs produce identical files.

use crate::error::Result;
use crate::growth::{ContactNetwork, FEMALE};
use crate::harness::format_sig6;
use std::io::Write;

pub const EDGE_HEADER: &str = "female_id,male_id,created_at,expected_duration,kind";
pub const NODE_HEADER: &str = "id,age,gender,delta,lsp,join_time";

/// Writes the active links: `female_id,male_id,created_at,expected_duration,kind`,
/// in creation order.
pub fn write_edge_list(network: &ContactNetwork, mut w: impl Write) -> Result<()> {
    writeln!(w, "{EDGE_HEADER}")?;
    for link in network.active_links() {
        writeln!(
            w,
            "{},{},{},{},{}",
            link.female,
            link.male,
            link.created_at,
            format_sig6(link.expected_duration),
            link.kind.name()
        )?;
    }
    Ok(())
}

/// Writes the person table: `id,age,gender,delta,lsp,join_time`, in id
/// order. Gender is `f`/`m`; persons who never joined leave `join_time`
/// empty.
pub fn write_node_table(network: &ContactNetwork, mut w: impl Write) -> Result<()> {
    writeln!(w, "{NODE_HEADER}")?;
    for p in &network.persons {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            p.id,
            p.age,
            if p.gender == FEMALE { "f" } else { "m" },
            format_sig6(p.mean_rel_duration),
            p.lsp,
            p.join_time.map(|t| t.to_string()).unwrap_or_default()
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::growth::{LinkKind, Person, MALE};

    #[test]
    fn snapshot_layout() {
        let persons = vec![
            Person {
                id: 0,
                age: 24,
                gender: FEMALE,
                mean_rel_duration: 80.0,
                lsp: 12,
                join_time: None,
                ever_linked: false,
            },
            Person {
                id: 1,
                age: 31,
                gender: MALE,
                mean_rel_duration: 120.5,
                lsp: 8,
                join_time: None,
                ever_linked: false,
            },
            Person {
                id: 2,
                age: 19,
                gender: FEMALE,
                mean_rel_duration: 60.25,
                lsp: 17,
                join_time: None,
                ever_linked: false,
            },
        ];
        let mut net = ContactNetwork::new(persons, 3.5);
        net.mark_joined(0, 0);
        net.mark_joined(1, 2);
        net.add_link(1, 0, 3, 45.5, LinkKind::Primary);

        let mut edges = Vec::new();
        write_edge_list(&net, &mut edges).unwrap();
        assert_eq!(
            String::from_utf8(edges).unwrap(),
            "female_id,male_id,created_at,expected_duration,kind\n0,1,3,45.5000,primary\n"
        );

        let mut nodes = Vec::new();
        write_node_table(&net, &mut nodes).unwrap();
        assert_eq!(
            String::from_utf8(nodes).unwrap(),
            "id,age,gender,delta,lsp,join_time\n\
             0,24,f,80.0000,12,0\n\
             1,31,m,120.500,8,2\n\
             2,19,f,60.2500,17,\n"
        );
    }
}
