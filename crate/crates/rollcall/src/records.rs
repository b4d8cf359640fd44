//! Raw member, vote and roll-call records in the public roll-call CSV layout.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::io::Read;
use std::str::FromStr;

use chrono::NaiveDate;
use glass_core::congress::{Chamber, Party};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One chamber of one Congress.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NetworkKey {
    pub congress: u32,
    pub chamber: Chamber,
}

impl NetworkKey {
    pub fn new(congress: u32, chamber: Chamber) -> Self {
        NetworkKey { congress, chamber }
    }

    /// First and last day of the Congress. Each one opens on January 3.
    pub fn span(&self) -> (NaiveDate, NaiveDate) {
        let year = 1787 + 2 * self.congress as i32;
        let start = NaiveDate::from_ymd_opt(year, 1, 3).expect("valid date");
        let end = NaiveDate::from_ymd_opt(year + 2, 1, 3).expect("valid date");
        (start, end)
    }
}

impl fmt::Display for NetworkKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.congress, self.chamber)
    }
}

impl FromStr for NetworkKey {
    type Err = String;

    /// Accepts `74-house` or `74:senate`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (c, ch) = s
            .split_once(['-', ':'])
            .ok_or_else(|| format!("expected CONGRESS-CHAMBER, got `{s}`"))?;
        let congress = c.trim().parse().map_err(|_| format!("bad congress `{c}`"))?;
        Ok(NetworkKey { congress, chamber: ch.parse()? })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemberRecord {
    pub congress: u32,
    pub chamber: Chamber,
    pub member_id: u32,
    pub party_code: u32,
    pub name: String,
    pub state: String,
    pub bioguide: Option<String>,
}

impl MemberRecord {
    pub fn key(&self) -> NetworkKey {
        NetworkKey::new(self.congress, self.chamber)
    }

    /// Text before the first comma of the display name, e.g. `BANKHEAD`.
    pub fn surname(&self) -> &str {
        self.name.split(',').next().unwrap_or("").trim()
    }

    /// Text after the first comma of the display name.
    pub fn given_names(&self) -> &str {
        self.name.split_once(',').map_or("", |(_, g)| g.trim())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VoteRecord {
    pub congress: u32,
    pub chamber: Chamber,
    pub rollnumber: u32,
    pub member_id: u32,
    pub cast_code: u8,
}

impl VoteRecord {
    pub fn key(&self) -> NetworkKey {
        NetworkKey::new(self.congress, self.chamber)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RollCall {
    pub congress: u32,
    pub chamber: Chamber,
    pub rollnumber: u32,
    pub date: NaiveDate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Vote {
    Yea,
    Nay,
}

/// Which raw cast codes count as yea and nay.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CastCodes {
    pub yea: BTreeSet<u8>,
    pub nay: BTreeSet<u8>,
    /// Codes meaning the member did not sit at the time; never counted as a vote.
    pub not_member: BTreeSet<u8>,
}

impl Default for CastCodes {
    fn default() -> Self {
        CastCodes { yea: [1].into(), nay: [6].into(), not_member: [0].into() }
    }
}

impl CastCodes {
    /// Paired and announced positions count too.
    pub fn lenient() -> Self {
        CastCodes { yea: [1, 2, 3].into(), nay: [4, 5, 6].into(), not_member: [0].into() }
    }

    pub fn vote(&self, code: u8) -> Option<Vote> {
        if self.yea.contains(&code) {
            Some(Vote::Yea)
        } else if self.nay.contains(&code) {
            Some(Vote::Nay)
        } else {
            None
        }
    }

    pub fn is_recorded(&self, code: u8) -> bool {
        !self.not_member.contains(&code)
    }

    /// A code that maps back to `vote`.
    pub fn code_for(&self, vote: Vote) -> u8 {
        let set = match vote {
            Vote::Yea => &self.yea,
            Vote::Nay => &self.nay,
        };
        *set.iter().next().expect("non-empty cast-code set")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartyCodes {
    pub democrat: BTreeSet<u32>,
    pub republican: BTreeSet<u32>,
}

impl Default for PartyCodes {
    fn default() -> Self {
        PartyCodes { democrat: [100].into(), republican: [200].into() }
    }
}

impl PartyCodes {
    pub fn party(&self, code: u32) -> Option<Party> {
        if self.democrat.contains(&code) {
            Some(Party::Democrat)
        } else if self.republican.contains(&code) {
            Some(Party::Republican)
        } else {
            None
        }
    }

    pub fn code_for(&self, party: Party) -> u32 {
        let set = match party {
            Party::Democrat => &self.democrat,
            Party::Republican => &self.republican,
        };
        *set.iter().next().expect("non-empty party-code set")
    }
}

struct Columns(HashMap<String, usize>);

impl Columns {
    fn new(headers: &csv::ByteRecord) -> Self {
        Columns(
            headers
                .iter()
                .enumerate()
                .map(|(i, h)| (String::from_utf8_lossy(h).trim().to_ascii_lowercase(), i))
                .collect(),
        )
    }

    fn find(&self, aliases: &[&str]) -> Option<usize> {
        aliases.iter().find_map(|a| self.0.get(*a).copied())
    }

    fn require(&self, aliases: &[&str]) -> Result<usize> {
        self.find(aliases).ok_or_else(|| Error::MissingColumn(aliases.join("|")))
    }
}

fn field(rec: &csv::ByteRecord, idx: usize, line: u64) -> Result<&str> {
    let raw = rec.get(idx).ok_or_else(|| Error::Parse { line, message: format!("missing field {}", idx + 1) })?;
    std::str::from_utf8(raw)
        .map(str::trim)
        .map_err(|_| Error::Parse { line, message: "invalid UTF-8".into() })
}

/// Integers may be written as `100` or `100.0`.
fn parse_int<T: TryFrom<u64>>(s: &str, what: &str, line: u64) -> Result<T> {
    let bad = || Error::Parse { line, message: format!("bad {what} `{s}`") };
    let v: u64 = match s.parse() {
        Ok(v) => v,
        Err(_) => {
            let f: f64 = s.parse().map_err(|_| bad())?;
            if f < 0.0 || f.fract() != 0.0 || f > u64::MAX as f64 {
                return Err(bad());
            }
            f as u64
        }
    };
    T::try_from(v).map_err(|_| bad())
}

enum ChamberField {
    Known(Chamber),
    President,
}

fn parse_chamber(s: &str, line: u64) -> Result<ChamberField> {
    if s.eq_ignore_ascii_case("president") {
        return Ok(ChamberField::President);
    }
    s.parse()
        .map(ChamberField::Known)
        .map_err(|message| Error::Parse { line, message })
}

fn line_of(rec: &csv::ByteRecord) -> u64 {
    rec.position().map_or(0, |p| p.line())
}

fn reader<R: Read>(r: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new().flexible(true).from_reader(r)
}

/// Reads the members file. Presidential rows are skipped.
pub fn parse_members<R: Read>(input: R) -> Result<Vec<MemberRecord>> {
    let mut rdr = reader(input);
    let cols = Columns::new(rdr.byte_headers()?);
    let c_congress = cols.require(&["congress"])?;
    let c_chamber = cols.require(&["chamber"])?;
    let c_id = cols.require(&["icpsr", "member_id"])?;
    let c_party = cols.require(&["party_code", "party"])?;
    let c_name = cols.find(&["bioname", "name"]);
    let c_state = cols.find(&["state_abbrev", "state"]);
    let c_bioguide = cols.find(&["bioguide_id", "bioguide"]);

    let mut out = Vec::new();
    let mut rec = csv::ByteRecord::new();
    while rdr.read_byte_record(&mut rec)? {
        let line = line_of(&rec);
        let chamber = match parse_chamber(field(&rec, c_chamber, line)?, line)? {
            ChamberField::Known(c) => c,
            ChamberField::President => continue,
        };
        let opt = |c: Option<usize>| -> Result<String> {
            Ok(match c {
                Some(i) => field(&rec, i, line)?.to_string(),
                None => String::new(),
            })
        };
        let bioguide = opt(c_bioguide)?;
        out.push(MemberRecord {
            congress: parse_int(field(&rec, c_congress, line)?, "congress", line)?,
            chamber,
            member_id: parse_int(field(&rec, c_id, line)?, "member id", line)?,
            party_code: parse_int(field(&rec, c_party, line)?, "party code", line)?,
            name: opt(c_name)?,
            state: opt(c_state)?,
            bioguide: (!bioguide.is_empty()).then_some(bioguide),
        });
    }
    Ok(out)
}

/// Reads the votes file, keeping rows for which `keep` is true.
pub fn parse_votes_filtered<R: Read>(input: R, mut keep: impl FnMut(NetworkKey) -> bool) -> Result<Vec<VoteRecord>> {
    let mut rdr = reader(input);
    let cols = Columns::new(rdr.byte_headers()?);
    let c_congress = cols.require(&["congress"])?;
    let c_chamber = cols.require(&["chamber"])?;
    let c_roll = cols.require(&["rollnumber", "roll_number"])?;
    let c_id = cols.require(&["icpsr", "member_id"])?;
    let c_cast = cols.require(&["cast_code"])?;

    let mut out = Vec::new();
    let mut rec = csv::ByteRecord::new();
    while rdr.read_byte_record(&mut rec)? {
        let line = line_of(&rec);
        let chamber = match parse_chamber(field(&rec, c_chamber, line)?, line)? {
            ChamberField::Known(c) => c,
            ChamberField::President => continue,
        };
        let congress = parse_int(field(&rec, c_congress, line)?, "congress", line)?;
        if !keep(NetworkKey::new(congress, chamber)) {
            continue;
        }
        out.push(VoteRecord {
            congress,
            chamber,
            rollnumber: parse_int(field(&rec, c_roll, line)?, "roll number", line)?,
            member_id: parse_int(field(&rec, c_id, line)?, "member id", line)?,
            cast_code: parse_int(field(&rec, c_cast, line)?, "cast code", line)?,
        });
    }
    Ok(out)
}

pub fn parse_votes<R: Read>(input: R) -> Result<Vec<VoteRecord>> {
    parse_votes_filtered(input, |_| true)
}

/// Reads roll-call dates (`YYYY-MM-DD`).
pub fn parse_rollcalls<R: Read>(input: R) -> Result<Vec<RollCall>> {
    let mut rdr = reader(input);
    let cols = Columns::new(rdr.byte_headers()?);
    let c_congress = cols.require(&["congress"])?;
    let c_chamber = cols.require(&["chamber"])?;
    let c_roll = cols.require(&["rollnumber", "roll_number"])?;
    let c_date = cols.require(&["date"])?;

    let mut out = Vec::new();
    let mut rec = csv::ByteRecord::new();
    while rdr.read_byte_record(&mut rec)? {
        let line = line_of(&rec);
        let chamber = match parse_chamber(field(&rec, c_chamber, line)?, line)? {
            ChamberField::Known(c) => c,
            ChamberField::President => continue,
        };
        let date_s = field(&rec, c_date, line)?;
        let date = NaiveDate::parse_from_str(date_s, "%Y-%m-%d")
            .map_err(|e| Error::Parse { line, message: format!("bad date `{date_s}`: {e}") })?;
        out.push(RollCall {
            congress: parse_int(field(&rec, c_congress, line)?, "congress", line)?,
            chamber,
            rollnumber: parse_int(field(&rec, c_roll, line)?, "roll number", line)?,
            date,
        });
    }
    Ok(out)
}

/// Everything recorded for one chamber of one Congress before cleaning.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RawNetworkData {
    pub members: Vec<MemberRecord>,
    pub votes: Vec<VoteRecord>,
    pub dates: BTreeMap<u32, NaiveDate>,
}

/// Splits parsed records into per-network bundles, keeping only `wanted`.
pub fn group_by_network(
    members: Vec<MemberRecord>,
    votes: Vec<VoteRecord>,
    rollcalls: Vec<RollCall>,
    wanted: &BTreeSet<NetworkKey>,
) -> BTreeMap<NetworkKey, RawNetworkData> {
    let mut out: BTreeMap<NetworkKey, RawNetworkData> =
        wanted.iter().map(|k| (*k, RawNetworkData::default())).collect();
    for m in members {
        if let Some(d) = out.get_mut(&m.key()) {
            d.members.push(m);
        }
    }
    for v in votes {
        if let Some(d) = out.get_mut(&v.key()) {
            d.votes.push(v);
        }
    }
    for r in rollcalls {
        if let Some(d) = out.get_mut(&NetworkKey::new(r.congress, r.chamber)) {
            d.dates.insert(r.rollnumber, r.date);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const MEMBERS: &str = "\
congress,chamber,icpsr,state_icpsr,district_code,state_abbrev,party_code,occupancy,last_means,bioname,bioguide_id,born,died
74,President,99999,99,0,USA,100,,,\"ROOSEVELT, Franklin Delano\",,1882,1945
74,House,1001,41,1,AL,100,,,\"BANKHEAD, William Brockman\",B000094,1874,1940
74,House,1002,13,0,NY,200,,,\"SNELL, Bertrand Hollis\",S000624,1870,1958
74,House,1003,25,3,MN,537,,,\"KVALE, Paul John\",K000371,1896,1960
74,Senate,2001,42,0,AR,100.0,,,\"ROBINSON, Joseph Taylor\",R000337,1872,1937
";

    #[test]
    fn party_codes_map() {
        let members = parse_members(MEMBERS.as_bytes()).unwrap();
        let codes = PartyCodes::default();
        assert_eq!(members.len(), 4);
        assert_eq!(codes.party(members[0].party_code), Some(Party::Democrat));
        assert_eq!(codes.party(members[1].party_code), Some(Party::Republican));
        // third-party members survive parsing
        assert_eq!(members[2].party_code, 537);
        assert_eq!(codes.party(members[2].party_code), None);
        assert_eq!(members[3].party_code, 100);
        assert_eq!(members[0].surname(), "BANKHEAD");
        assert_eq!(members[0].given_names(), "William Brockman");
        assert_eq!(members[0].bioguide.as_deref(), Some("B000094"));
    }

    #[test]
    fn independent_code_is_kept_raw() {
        let csv = "congress,chamber,icpsr,party_code\n110,Senate,29147,328\n";
        let m = parse_members(csv.as_bytes()).unwrap();
        assert_eq!(m[0].party_code, 328);
        assert_eq!(PartyCodes::default().party(328), None);
    }

    #[test]
    fn votes_keep_raw_codes() {
        let csv = "congress,chamber,rollnumber,icpsr,cast_code,prob\n\
                   74,House,1,1001,1,99\n74,House,1,1002,6,99\n74,House,1,1003,7,\n74,House,2,1003,9,\n";
        let v = parse_votes(csv.as_bytes()).unwrap();
        assert_eq!(v.len(), 4);
        let cc = CastCodes::default();
        assert_eq!(cc.vote(v[0].cast_code), Some(Vote::Yea));
        assert_eq!(cc.vote(v[1].cast_code), Some(Vote::Nay));
        assert_eq!(cc.vote(v[2].cast_code), None);
        assert_eq!(v[2].cast_code, 7);
    }

    #[test]
    fn empty_votes_file() {
        assert!(parse_votes("congress,chamber,rollnumber,icpsr,cast_code\n".as_bytes()).unwrap().is_empty());
    }

    #[test]
    fn missing_column_is_named() {
        let err = parse_votes("congress,chamber,icpsr,cast_code\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::MissingColumn(ref c) if c.contains("rollnumber")), "{err}");
    }

    #[test]
    fn malformed_row_reports_line() {
        let csv = "congress,chamber,rollnumber,icpsr,cast_code\n74,House,1,1001,1\n74,House,x,1002,1\n";
        match parse_votes(csv.as_bytes()).unwrap_err() {
            Error::Parse { line, message } => {
                assert_eq!(line, 3);
                assert!(message.contains("roll number"));
            }
            e => panic!("{e}"),
        }
        let bad_chamber = "congress,chamber,rollnumber,icpsr,cast_code\n74,Parliament,1,1,1\n";
        assert!(matches!(parse_votes(bad_chamber.as_bytes()), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn filtered_votes() {
        let csv = "congress,chamber,rollnumber,icpsr,cast_code\n74,House,1,1,1\n75,House,1,1,1\n74,Senate,1,2,6\n";
        let keep = NetworkKey::new(74, Chamber::Senate);
        let v = parse_votes_filtered(csv.as_bytes(), |k| k == keep).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].member_id, 2);
    }

    #[test]
    fn rollcall_dates() {
        let csv = "congress,chamber,rollnumber,date,session\n74,House,1,1935-01-03,1\n74,Senate,2,1935-01-10,1\n";
        let r = parse_rollcalls(csv.as_bytes()).unwrap();
        assert_eq!(r[1].date, NaiveDate::from_ymd_opt(1935, 1, 10).unwrap());
        let bad = "congress,chamber,rollnumber,date\n74,House,1,03/01/1935\n";
        assert!(matches!(parse_rollcalls(bad.as_bytes()), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn congress_span() {
        let (s, e) = NetworkKey::new(74, Chamber::House).span();
        assert_eq!(s, NaiveDate::from_ymd_opt(1935, 1, 3).unwrap());
        assert_eq!(e, NaiveDate::from_ymd_opt(1937, 1, 3).unwrap());
        let (s, _) = NetworkKey::new(115, Chamber::Senate).span();
        assert_eq!(s, NaiveDate::from_ymd_opt(2017, 1, 3).unwrap());
    }

    #[test]
    fn network_key_round_trip() {
        let k: NetworkKey = "90-senate".parse().unwrap();
        assert_eq!(k, NetworkKey::new(90, Chamber::Senate));
        assert_eq!(k.to_string(), "90-senate");
        assert!("90".parse::<NetworkKey>().is_err());
    }

    #[test]
    fn grouping() {
        let members = parse_members(MEMBERS.as_bytes()).unwrap();
        let votes = vec![
            VoteRecord { congress: 74, chamber: Chamber::House, rollnumber: 1, member_id: 1001, cast_code: 1 },
            VoteRecord { congress: 74, chamber: Chamber::Senate, rollnumber: 1, member_id: 2001, cast_code: 1 },
        ];
        let wanted: BTreeSet<_> = [NetworkKey::new(74, Chamber::House)].into();
        let g = group_by_network(members, votes, vec![], &wanted);
        assert_eq!(g.len(), 1);
        let h = &g[&NetworkKey::new(74, Chamber::House)];
        assert_eq!((h.members.len(), h.votes.len()), (3, 1));
    }
}
