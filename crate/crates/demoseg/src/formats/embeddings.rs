use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use demoseg_core::lexdist::{EmbeddingParser, EmbeddingTable, LoadedEmbeddings};

use crate::error::{Error, Result};

/// Reads a word-vector text file, streaming line by line.
pub fn load_embeddings(path: &Path) -> Result<LoadedEmbeddings> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut parser = EmbeddingParser::new();
    for line in BufReader::new(file).lines() {
        let line = line.map_err(|e| Error::io(path, e))?;
        parser.push_line(&line).map_err(|e| Error::format(path, e))?;
    }
    parser.finish().map_err(|e| Error::format(path, e))
}

/// Writes the table with a `<size> <dim>` header, words in sorted order.
pub fn write_embeddings<W: io::Write>(writer: W, table: &EmbeddingTable) -> io::Result<()> {
    let mut w = BufWriter::new(writer);
    writeln!(w, "{} {}", table.len(), table.dim())?;
    for (word, v) in table.iter() {
        write!(w, "{word}")?;
        for x in v {
            write!(w, " {x}")?;
        }
        writeln!(w)?;
    }
    w.flush()
}

pub fn save_embeddings(path: &Path, table: &EmbeddingTable) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_embeddings(file, table).map_err(|e| Error::io(path, e))
}
