// CSV loading, schema inference and the on-disk store.

use std::error::Error;

use kpiforge::dataset::{load_csv, Cell};
use kpiforge::store::Store;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let csv = "Student,Course,CGPA,Note\ns1,MCA,7.5,NA\ns2,B.Tech,,ok\ns3,MCA,8.25,\n";
    let ds = load_csv(csv.as_bytes(), "tiny")?;
    for col in ds.schema() {
        println!("{:<8} {:?} distinct={} missing={}", col.name, col.kind, col.distinct_count, col.missing_count);
    }
    // only the empty cell is missing; "NA" is ordinary text
    assert_eq!(ds.column("Note")?.cell(0), Cell::Text("NA"));
    assert_eq!(ds.column("CGPA")?.cell(1), Cell::Missing);

    let dir = tempfile::tempdir()?;
    let store = Store::open(dir.path())?;
    let id = store.save_dataset(&ds)?;
    let back = store.load_dataset(&id)?;
    assert_eq!(back.columns(), ds.columns());
    println!("stored as {}/datasets/{id}.json", dir.path().display());
    print!("{}", String::from_utf8(back.to_csv())?);
    Ok(())
}

fn main() {
    run_example().unwrap();
}
