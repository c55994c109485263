//! The four preprocessing types applied to one tweet, with the bundled Spanish
//! stopwords and lemmas.
//!
//! ```sh
//! cargo run -p stance-corpus --example preprocess_types
//! ```

use stance_corpus::text::{preprocess, PreprocessResources, PreprocessType};

fn main() {
    let resources = PreprocessResources::bundled();
    let tweet = "@pilarc_pilarc Ten, manipuladora se te cayó el ME ESTAS HABLANDO EN POLACO??  que le suelta el fachamierda primero #ZASCA https://t.co/XQ08KuVgtI";
    println!("raw: {tweet}");
    for kind in PreprocessType::ALL {
        println!("{kind}:   {}", preprocess(tweet, kind, &resources, "es").unwrap());
    }
}
