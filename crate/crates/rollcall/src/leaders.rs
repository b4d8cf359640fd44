//! Curated party leaders and Speakers with their active date ranges.
//!
//! The raw roll-call data does not say who led each party, so the shipped
//! table covers Congresses 74 to 115 and can be replaced by a user file.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use chrono::NaiveDate;
use glass_core::congress::{Chamber, Party};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::records::{MemberRecord, NetworkKey, PartyCodes};

const SHIPPED: &str = include_str!("../data/leaders.csv");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Leader,
    Speaker,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::Leader => "leader",
            Role::Speaker => "speaker",
        })
    }
}

impl FromStr for Role {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "leader" => Ok(Role::Leader),
            "speaker" => Ok(Role::Speaker),
            other => Err(format!("unknown role `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeaderEntry {
    pub congress: u32,
    pub chamber: Chamber,
    pub member_id: Option<u32>,
    /// `SURNAME` or `SURNAME, Given` as in the members file.
    pub name: String,
    pub state: String,
    pub party: Party,
    pub role: Role,
    pub start: Option<NaiveDate>,
    pub end: Option<NaiveDate>,
}

impl LeaderEntry {
    pub fn key(&self) -> NetworkKey {
        NetworkKey::new(self.congress, self.chamber)
    }

    /// Inclusive active range, defaulting to the whole Congress.
    pub fn active_range(&self) -> (NaiveDate, NaiveDate) {
        let (s, e) = self.key().span();
        (self.start.unwrap_or(s), self.end.unwrap_or(e))
    }

    fn describe(&self) -> String {
        match self.member_id {
            Some(id) => format!("{} ({id})", self.name),
            None => format!("{} {}", self.name, self.state),
        }
    }

    fn matches(&self, m: &MemberRecord) -> bool {
        if let Some(id) = self.member_id {
            return m.member_id == id;
        }
        let (surname, given) = match self.name.split_once(',') {
            Some((s, g)) => (s.trim(), g.trim()),
            None => (self.name.trim(), ""),
        };
        m.surname().eq_ignore_ascii_case(surname)
            && (self.state.is_empty() || m.state.eq_ignore_ascii_case(&self.state))
            && m.given_names().to_ascii_lowercase().starts_with(&given.to_ascii_lowercase())
    }
}

/// A leader entry pinned to a member id of one network.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResolvedLeader {
    pub member_id: u32,
    pub party: Party,
    pub role: Role,
    pub start: NaiveDate,
    pub end: NaiveDate,
}

impl ResolvedLeader {
    pub fn active_on(&self, date: NaiveDate) -> bool {
        self.start <= date && date <= self.end
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct LeadersConfig {
    entries: Vec<LeaderEntry>,
}

impl LeadersConfig {
    pub fn new(entries: Vec<LeaderEntry>) -> Result<Self> {
        let cfg = LeadersConfig { entries };
        cfg.validate()?;
        Ok(cfg)
    }

    /// The table bundled with the crate.
    pub fn shipped() -> Self {
        Self::parse(SHIPPED.as_bytes()).expect("bundled leaders table is valid")
    }

    pub fn shipped_text() -> &'static str {
        SHIPPED
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::parse(std::fs::File::open(path)?)
    }

    /// Columns: `congress,chamber,member_id,name,state,party,role,start,end`.
    /// Lines starting with `#` are ignored.
    pub fn parse<R: Read>(input: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(input);
        let headers = rdr.headers()?.clone();
        let col = |name: &str| {
            headers
                .iter()
                .position(|h| h.eq_ignore_ascii_case(name))
                .ok_or_else(|| Error::MissingColumn(name.to_string()))
        };
        let (c_congress, c_chamber, c_party, c_role) = (col("congress")?, col("chamber")?, col("party")?, col("role")?);
        let (c_id, c_name, c_state, c_start, c_end) =
            (col("member_id")?, col("name")?, col("state")?, col("start")?, col("end")?);

        let mut entries = Vec::new();
        for row in rdr.records() {
            let row = row?;
            let line = row.position().map_or(0, |p| p.line());
            let err = |message: String| Error::Parse { line, message };
            let get = |i: usize| row.get(i).unwrap_or("");
            let date = |i: usize| -> Result<Option<NaiveDate>> {
                let s = get(i);
                if s.is_empty() {
                    return Ok(None);
                }
                NaiveDate::parse_from_str(s, "%Y-%m-%d").map(Some).map_err(|e| err(format!("bad date `{s}`: {e}")))
            };
            let member_id = match get(c_id) {
                "" => None,
                s => Some(s.parse().map_err(|_| err(format!("bad member id `{s}`")))?),
            };
            let name = get(c_name).to_string();
            if member_id.is_none() && name.is_empty() {
                return Err(err("either member_id or name is required".into()));
            }
            entries.push(LeaderEntry {
                congress: get(c_congress).parse().map_err(|_| err(format!("bad congress `{}`", get(c_congress))))?,
                chamber: get(c_chamber).parse().map_err(err)?,
                member_id,
                name,
                state: get(c_state).to_string(),
                party: get(c_party).parse().map_err(err)?,
                role: get(c_role).parse().map_err(err)?,
                start: date(c_start)?,
                end: date(c_end)?,
            });
        }
        Self::new(entries)
    }

    pub fn entries(&self) -> &[LeaderEntry] {
        &self.entries
    }

    pub fn networks(&self) -> BTreeSet<NetworkKey> {
        self.entries.iter().map(LeaderEntry::key).collect()
    }

    pub fn for_network(&self, key: NetworkKey) -> Vec<&LeaderEntry> {
        self.entries.iter().filter(|e| e.key() == key).collect()
    }

    /// Checks date ranges, roles and per-network coverage.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidLeaders(msg));
        let mut by_net: BTreeMap<NetworkKey, Vec<&LeaderEntry>> = BTreeMap::new();
        for e in &self.entries {
            let key = e.key();
            let (cs, ce) = key.span();
            let (s, t) = e.active_range();
            if s > t {
                return bad(format!("{key}: {} starts after it ends", e.describe()));
            }
            if s < cs || t > ce {
                return bad(format!("{key}: {} active outside {cs}..{ce}", e.describe()));
            }
            if e.role == Role::Speaker && e.chamber != Chamber::House {
                return bad(format!("{key}: Speaker entries are House-only"));
            }
            by_net.entry(key).or_default().push(e);
        }
        for (key, list) in by_net {
            for party in [Party::Democrat, Party::Republican] {
                let mut ranges: Vec<_> = list
                    .iter()
                    .filter(|e| e.role == Role::Leader && e.party == party)
                    .map(|e| e.active_range())
                    .collect();
                if ranges.is_empty() {
                    return bad(format!("{key}: no {party} leader"));
                }
                ranges.sort();
                if ranges.windows(2).any(|w| w[1].0 <= w[0].1) {
                    return bad(format!("{key}: overlapping {party} leaders"));
                }
            }
            if key.chamber == Chamber::House && !list.iter().any(|e| e.role == Role::Speaker) {
                return bad(format!("{key}: no Speaker"));
            }
        }
        Ok(())
    }

    /// Pins each entry for `key` to one of `members`. Name matches that hit
    /// several records are narrowed to members with votes and then to the
    /// entry's party.
    pub fn resolve(
        &self,
        key: NetworkKey,
        members: &[MemberRecord],
        party_codes: &PartyCodes,
        has_votes: impl Fn(u32) -> bool,
    ) -> Result<Vec<ResolvedLeader>> {
        let entries = self.for_network(key);
        if entries.is_empty() {
            return Err(Error::LeadersMissing(key));
        }
        let mut out = Vec::with_capacity(entries.len());
        for e in entries {
            let mut cands: Vec<&MemberRecord> = members.iter().filter(|m| e.matches(m)).collect();
            if cands.len() > 1 && cands.iter().any(|m| has_votes(m.member_id)) {
                cands.retain(|m| has_votes(m.member_id));
            }
            if cands.len() > 1 && cands.iter().any(|m| party_codes.party(m.party_code) == Some(e.party)) {
                cands.retain(|m| party_codes.party(m.party_code) == Some(e.party));
            }
            let ids: BTreeSet<u32> = cands.iter().map(|m| m.member_id).collect();
            let id = match ids.len() {
                0 => return Err(Error::LeaderNotFound { key, name: e.describe() }),
                1 => *ids.iter().next().unwrap(),
                _ => return Err(Error::AmbiguousLeader { key, name: e.describe(), candidates: ids.into_iter().collect() }),
            };
            let (start, end) = e.active_range();
            out.push(ResolvedLeader { member_id: id, party: e.party, role: e.role, start, end });
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn member(id: u32, name: &str, state: &str, party: u32) -> MemberRecord {
        MemberRecord {
            congress: 90,
            chamber: Chamber::House,
            member_id: id,
            party_code: party,
            name: name.into(),
            state: state.into(),
            bioguide: None,
        }
    }

    const SMALL: &str = "\
congress,chamber,member_id,name,state,party,role,start,end
90,house,,\"ALBERT\",OK,D,leader,,
90,house,,\"FORD, Gerald\",MI,R,leader,,
90,house,7,,,D,speaker,,
";

    #[test]
    fn shipped_table_is_valid_and_complete() {
        let cfg = LeadersConfig::shipped();
        let nets = cfg.networks();
        assert_eq!(nets.len(), 84);
        for c in 74..=115 {
            for ch in [Chamber::House, Chamber::Senate] {
                assert!(nets.contains(&NetworkKey::new(c, ch)), "{c} {ch}");
            }
        }
    }

    #[test]
    fn resolves_by_name_state_and_given_prefix() {
        let cfg = LeadersConfig::parse(SMALL.as_bytes()).unwrap();
        let members = vec![
            member(1, "ALBERT, Carl Bert", "OK", 100),
            member(2, "FORD, Gerald Rudolph, Jr.", "MI", 200),
            member(3, "FORD, William David", "MI", 100),
            member(7, "McCORMACK, John William", "MA", 100),
        ];
        let r = cfg.resolve(NetworkKey::new(90, Chamber::House), &members, &PartyCodes::default(), |_| true).unwrap();
        let ids: Vec<u32> = r.iter().map(|l| l.member_id).collect();
        assert_eq!(ids, vec![1, 2, 7]);
        assert_eq!(r[2].role, Role::Speaker);
        assert_eq!(r[0].start, NaiveDate::from_ymd_opt(1967, 1, 3).unwrap());
    }

    #[test]
    fn party_breaks_name_ties() {
        let csv = "congress,chamber,member_id,name,state,party,role,start,end\n\
                   90,house,,FORD,MI,R,leader,,\n90,house,,ALBERT,OK,D,leader,,\n90,house,,ALBERT,OK,D,speaker,,\n";
        let cfg = LeadersConfig::parse(csv.as_bytes()).unwrap();
        let members = vec![
            member(1, "ALBERT, Carl", "OK", 100),
            member(2, "FORD, Gerald", "MI", 200),
            member(3, "FORD, William", "MI", 100),
        ];
        let r = cfg.resolve(NetworkKey::new(90, Chamber::House), &members, &PartyCodes::default(), |_| true).unwrap();
        assert_eq!(r[0].member_id, 2);
    }

    #[test]
    fn unresolvable_names() {
        let cfg = LeadersConfig::parse(SMALL.as_bytes()).unwrap();
        let key = NetworkKey::new(90, Chamber::House);
        let members = vec![member(1, "ALBERT, Carl", "OK", 100), member(7, "X, Y", "MA", 100)];
        assert!(matches!(
            cfg.resolve(key, &members, &PartyCodes::default(), |_| true),
            Err(Error::LeaderNotFound { .. })
        ));
        let twins = vec![
            member(1, "ALBERT, Carl", "OK", 100),
            member(4, "ALBERT, Carl", "OK", 100),
            member(2, "FORD, Gerald", "MI", 200),
            member(7, "X, Y", "MA", 100),
        ];
        assert!(matches!(
            cfg.resolve(key, &twins, &PartyCodes::default(), |_| true),
            Err(Error::AmbiguousLeader { ref candidates, .. }) if candidates == &vec![1, 4]
        ));
        // only one of the twins ever voted
        let r = cfg.resolve(key, &twins, &PartyCodes::default(), |id| id != 4).unwrap();
        assert_eq!(r[0].member_id, 1);
        assert!(matches!(
            cfg.resolve(NetworkKey::new(91, Chamber::House), &members, &PartyCodes::default(), |_| true),
            Err(Error::LeadersMissing(_))
        ));
    }

    #[test]
    fn validation_rules() {
        let base = "congress,chamber,member_id,name,state,party,role,start,end\n";
        let check = |rows: &str| LeadersConfig::parse(format!("{base}{rows}").as_bytes());
        // missing Republican
        assert!(matches!(check("80,senate,1,,,D,leader,,\n"), Err(Error::InvalidLeaders(_))));
        // speaker in the Senate
        assert!(check("80,senate,1,,,D,leader,,\n80,senate,2,,,R,leader,,\n80,senate,3,,,D,speaker,,\n").is_err());
        // House without a Speaker
        assert!(check("80,house,1,,,D,leader,,\n80,house,2,,,R,leader,,\n").is_err());
        // dates outside the Congress
        assert!(check("80,senate,1,,,D,leader,1946-01-01,\n80,senate,2,,,R,leader,,\n").is_err());
        // overlapping same-party leaders
        assert!(check(
            "80,senate,1,,,D,leader,,1948-01-01\n80,senate,4,,,D,leader,1947-06-01,\n80,senate,2,,,R,leader,,\n"
        )
        .is_err());
        // consecutive leaders are fine
        assert!(check(
            "80,senate,1,,,D,leader,,1948-01-01\n80,senate,4,,,D,leader,1948-01-02,\n80,senate,2,,,R,leader,,\n"
        )
        .is_ok());
        // neither id nor name
        assert!(matches!(check("80,senate,,,,D,leader,,\n"), Err(Error::Parse { line: 2, .. })));
    }
}
