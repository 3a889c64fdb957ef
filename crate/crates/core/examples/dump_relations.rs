fn main() {
    let v = monster_core::presentation::catalog_json();
    println!("{}", serde_json::to_string_pretty(&v).unwrap());
}
