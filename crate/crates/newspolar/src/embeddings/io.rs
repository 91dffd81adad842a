//! Embedding model persistence.
//!
//! Binary layout, all little-endian:
//!   magic "SGNSEMB1", version u32,
//!   dim u32, |V| u64, buckets u64, n_min u32, n_max u32, seed u64,
//!   window u32, negatives u32, epochs u32, learning_rate f64,
//!   min_count u64, total_tokens u64,
//!   |V| x { token_len u32, token utf-8, count u64 },
//!   word vectors |V| x dim f32 row-major,
//!   subword vectors buckets x dim f32 row-major.
//!
//! The text export is the common interop shape: a `count dim` header
//! line then one token per line with its composed vector.

use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

use super::{EmbeddingModel, TrainConfig, VocabWord, Vocabulary};
use crate::{Error, Result};

const MAGIC: &[u8; 8] = b"SGNSEMB1";
const VERSION: u32 = 1;

pub fn write_binary(model: &EmbeddingModel, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io_err = |e: std::io::Error| Error::io(path, e);

    w.write_all(MAGIC).map_err(io_err)?;
    w.write_u32::<LittleEndian>(VERSION).map_err(io_err)?;
    let c = model.config();
    w.write_u32::<LittleEndian>(c.dim as u32).map_err(io_err)?;
    w.write_u64::<LittleEndian>(model.vocab().len() as u64).map_err(io_err)?;
    w.write_u64::<LittleEndian>(c.buckets as u64).map_err(io_err)?;
    w.write_u32::<LittleEndian>(c.n_min as u32).map_err(io_err)?;
    w.write_u32::<LittleEndian>(c.n_max as u32).map_err(io_err)?;
    w.write_u64::<LittleEndian>(model.seed()).map_err(io_err)?;
    w.write_u32::<LittleEndian>(c.window as u32).map_err(io_err)?;
    w.write_u32::<LittleEndian>(c.negatives as u32).map_err(io_err)?;
    w.write_u32::<LittleEndian>(c.epochs as u32).map_err(io_err)?;
    w.write_f64::<LittleEndian>(c.learning_rate).map_err(io_err)?;
    w.write_u64::<LittleEndian>(model.vocab().min_count()).map_err(io_err)?;
    w.write_u64::<LittleEndian>(model.vocab().total_tokens()).map_err(io_err)?;

    for word in model.vocab().words() {
        let bytes = word.token.as_bytes();
        w.write_u32::<LittleEndian>(bytes.len() as u32).map_err(io_err)?;
        w.write_all(bytes).map_err(io_err)?;
        w.write_u64::<LittleEndian>(word.count).map_err(io_err)?;
    }
    for v in model.word_vecs() {
        w.write_f32::<LittleEndian>(*v).map_err(io_err)?;
    }
    for v in model.subword_vecs() {
        w.write_f32::<LittleEndian>(*v).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

pub fn read_binary(path: &Path) -> Result<EmbeddingModel> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = BufReader::new(file);
    let io_err = |e: std::io::Error| Error::io(path, e);

    let mut magic = [0u8; 8];
    r.read_exact(&mut magic).map_err(io_err)?;
    if &magic != MAGIC {
        return Err(Error::domain(format!(
            "{} is not an embedding model file",
            path.display()
        )));
    }
    let version = r.read_u32::<LittleEndian>().map_err(io_err)?;
    if version != VERSION {
        return Err(Error::domain(format!("unsupported model version {version}")));
    }
    let dim = r.read_u32::<LittleEndian>().map_err(io_err)? as usize;
    let vocab_len = r.read_u64::<LittleEndian>().map_err(io_err)? as usize;
    let buckets = r.read_u64::<LittleEndian>().map_err(io_err)? as usize;
    let n_min = r.read_u32::<LittleEndian>().map_err(io_err)? as usize;
    let n_max = r.read_u32::<LittleEndian>().map_err(io_err)? as usize;
    let seed = r.read_u64::<LittleEndian>().map_err(io_err)?;
    let window = r.read_u32::<LittleEndian>().map_err(io_err)? as usize;
    let negatives = r.read_u32::<LittleEndian>().map_err(io_err)? as usize;
    let epochs = r.read_u32::<LittleEndian>().map_err(io_err)? as usize;
    let learning_rate = r.read_f64::<LittleEndian>().map_err(io_err)?;
    let min_count = r.read_u64::<LittleEndian>().map_err(io_err)?;
    let total_tokens = r.read_u64::<LittleEndian>().map_err(io_err)?;

    let config = TrainConfig {
        dim,
        window,
        negatives,
        epochs,
        learning_rate,
        n_min,
        n_max,
        buckets,
    };
    config.validate()?;

    let mut words = Vec::with_capacity(vocab_len);
    for _ in 0..vocab_len {
        let len = r.read_u32::<LittleEndian>().map_err(io_err)? as usize;
        let mut buf = vec![0u8; len];
        r.read_exact(&mut buf).map_err(io_err)?;
        let token = String::from_utf8(buf)
            .map_err(|e| Error::domain(format!("bad token in model file: {e}")))?;
        let count = r.read_u64::<LittleEndian>().map_err(io_err)?;
        words.push(VocabWord { token, count });
    }
    let vocab = Vocabulary::from_parts(words, min_count, total_tokens);

    let mut word_vecs = vec![0f32; vocab_len * dim];
    r.read_f32_into::<LittleEndian>(&mut word_vecs).map_err(io_err)?;
    let mut subword_vecs = vec![0f32; buckets * dim];
    r.read_f32_into::<LittleEndian>(&mut subword_vecs).map_err(io_err)?;

    Ok(EmbeddingModel::new(config, seed, vocab, word_vecs, subword_vecs))
}

/// Interop text export: composed vector per vocabulary word.
pub fn write_text(model: &EmbeddingModel, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io_err = |e: std::io::Error| Error::io(path, e);

    writeln!(w, "{} {}", model.vocab().len(), model.dim()).map_err(io_err)?;
    for (idx, word) in model.vocab().words().iter().enumerate() {
        write!(w, "{}", word.token).map_err(io_err)?;
        for v in model.vector_by_idx(idx as u32) {
            write!(w, " {v:.6}").map_err(io_err)?;
        }
        writeln!(w).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}
