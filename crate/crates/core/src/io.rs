//! File formats: FRV1 frame tensors, MSK1 masks, CSV series and bitstring
//! files. Floats are written in shortest round-trip form, so reading back
//! reproduces every value exactly.

use std::fs;
use std::io::{self, BufRead, BufReader, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::pulse::{CycleSet, IpiSequence, PeakList};
use crate::signal::{FrameSequence, RgbTrace, RoiMask, SampledSignal};

const FRV1: &[u8; 4] = b"FRV1";
const MSK1: &[u8; 4] = b"MSK1";

fn format_err(msg: impl Into<String>) -> Error {
    Error::Format(msg.into())
}

fn read_exact_or(r: &mut impl Read, buf: &mut [u8], what: &str) -> Result<()> {
    r.read_exact(buf).map_err(|e| match e.kind() {
        io::ErrorKind::UnexpectedEof => format_err(format!("truncated {what}")),
        _ => Error::from(e),
    })
}

fn read_u32(r: &mut impl Read, what: &str) -> Result<u32> {
    let mut b = [0u8; 4];
    read_exact_or(r, &mut b, what)?;
    Ok(u32::from_le_bytes(b))
}

fn dim(v: usize, what: &str) -> Result<u32> {
    u32::try_from(v).map_err(|_| format_err(format!("{what} {v} exceeds u32")))
}

pub fn write_frv1(w: &mut (impl Write + ?Sized), video: &FrameSequence) -> Result<()> {
    w.write_all(FRV1)?;
    w.write_all(&dim(video.width(), "width")?.to_le_bytes())?;
    w.write_all(&dim(video.height(), "height")?.to_le_bytes())?;
    w.write_all(&dim(video.frame_count(), "frame count")?.to_le_bytes())?;
    w.write_all(&video.fps().to_le_bytes())?;
    w.write_all(video.data())?;
    Ok(())
}

pub fn read_frv1(r: &mut impl Read) -> Result<FrameSequence> {
    let mut magic = [0u8; 4];
    read_exact_or(r, &mut magic, "FRV1 header")?;
    if &magic != FRV1 {
        return Err(format_err("not an FRV1 file"));
    }
    let width = read_u32(r, "FRV1 header")? as usize;
    let height = read_u32(r, "FRV1 header")? as usize;
    let count = read_u32(r, "FRV1 header")? as usize;
    let mut fps = [0u8; 8];
    read_exact_or(r, &mut fps, "FRV1 header")?;
    let fps = f64::from_le_bytes(fps);
    let len = width
        .checked_mul(height)
        .and_then(|p| p.checked_mul(3))
        .and_then(|f| f.checked_mul(count))
        .ok_or_else(|| format_err("FRV1 dimensions overflow"))?;
    let mut data = Vec::new();
    r.take(len as u64).read_to_end(&mut data)?;
    if data.len() != len {
        return Err(format_err(format!("truncated FRV1 payload: {} of {len} bytes", data.len())));
    }
    let mut rest = [0u8; 1];
    if r.read(&mut rest)? != 0 {
        return Err(format_err("trailing bytes after FRV1 payload"));
    }
    FrameSequence::new(width, height, fps, data).map_err(|e| format_err(format!("invalid FRV1: {e}")))
}

pub fn write_msk1(w: &mut (impl Write + ?Sized), mask: &RoiMask) -> Result<()> {
    w.write_all(MSK1)?;
    w.write_all(&dim(mask.width(), "width")?.to_le_bytes())?;
    w.write_all(&dim(mask.height(), "height")?.to_le_bytes())?;
    w.write_all(&dim(mask.mask_count(), "mask count")?.to_le_bytes())?;
    for m in mask.masks() {
        w.write_all(m)?;
    }
    Ok(())
}

pub fn read_msk1(r: &mut impl Read) -> Result<RoiMask> {
    let mut magic = [0u8; 4];
    read_exact_or(r, &mut magic, "MSK1 header")?;
    if &magic != MSK1 {
        return Err(format_err("not an MSK1 file"));
    }
    let width = read_u32(r, "MSK1 header")? as usize;
    let height = read_u32(r, "MSK1 header")? as usize;
    let count = read_u32(r, "MSK1 header")? as usize;
    let frame = width.checked_mul(height).ok_or_else(|| format_err("MSK1 dimensions overflow"))?;
    let mut masks = Vec::with_capacity(count.min(1 << 16));
    for _ in 0..count {
        let mut m = vec![0u8; frame];
        read_exact_or(r, &mut m, "MSK1 payload")?;
        masks.push(m);
    }
    RoiMask::new(width, height, masks).map_err(|e| format_err(format!("invalid MSK1: {e}")))
}

fn csv_reader<R: Read>(r: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(r)
}

fn csv_err(e: csv::Error) -> Error {
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::from(io),
            other => format_err(format!("{other:?}")),
        }
    } else {
        format_err(e.to_string())
    }
}

fn check_header<R: Read>(rdr: &mut csv::Reader<R>, expected: &[&str]) -> Result<()> {
    let h = rdr.headers().map_err(csv_err)?;
    if h.iter().ne(expected.iter().copied()) {
        return Err(format_err(format!("expected header {:?}, found {:?}", expected.join(","), h)));
    }
    Ok(())
}

fn parse_f64(field: &str, line: u64) -> Result<f64> {
    field.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| format_err(format!("line {line}: bad number {field:?}")))
}

fn read_rows<R: Read>(r: R, header: &[&str]) -> Result<Vec<Vec<f64>>> {
    let mut rdr = csv_reader(r);
    check_header(&mut rdr, header)?;
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_err)?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != header.len() {
            return Err(format_err(format!("line {line}: expected {} fields", header.len())));
        }
        rows.push(rec.iter().map(|f| parse_f64(f, line)).collect::<Result<_>>()?);
    }
    Ok(rows)
}

fn write_rows(w: &mut (impl Write + ?Sized), header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(header).map_err(csv_err)?;
    for r in rows {
        wtr.write_record(&r).map_err(csv_err)?;
    }
    wtr.flush()?;
    Ok(())
}

/// `t,value` with `t = i / sample_rate`.
pub fn write_signal_csv(w: &mut (impl Write + ?Sized), s: &SampledSignal<f64>) -> Result<()> {
    let fs = s.sample_rate();
    write_rows(w, &["t", "value"], s.values().iter().enumerate().map(|(i, v)| vec![(i as f64 / fs).to_string(), v.to_string()]))
}

/// Reads a `t,value` file. The sample rate is taken from the time span and
/// rounded to 1e-3 Hz; `fps` overrides it (and is required for a single row).
pub fn read_signal_csv(r: impl Read, fps: Option<f64>) -> Result<SampledSignal<f64>> {
    let rows = read_rows(r, &["t", "value"])?;
    if rows.is_empty() {
        return Err(format_err("signal file has no samples"));
    }
    let rate = match fps {
        Some(f) => f,
        None => {
            let span = rows[rows.len() - 1][0] - rows[0][0];
            if rows.len() < 2 || !(span > 0.0) {
                return Err(format_err("cannot infer the sample rate; pass it explicitly"));
            }
            ((rows.len() - 1) as f64 / span * 1000.0).round() / 1000.0
        }
    };
    SampledSignal::new(rows.into_iter().map(|r| r[1]).collect(), rate)
}

pub fn write_trace_csv(w: &mut (impl Write + ?Sized), trace: &RgbTrace<f64>) -> Result<()> {
    write_rows(
        w,
        &["frame", "r", "g", "b"],
        trace.samples().iter().enumerate().map(|(i, s)| vec![i.to_string(), s[0].to_string(), s[1].to_string(), s[2].to_string()]),
    )
}

pub fn read_trace_csv(r: impl Read, fps: f64) -> Result<RgbTrace<f64>> {
    let rows = read_rows(r, &["frame", "r", "g", "b"])?;
    RgbTrace::new(rows.into_iter().map(|r| [r[1], r[2], r[3]]).collect(), fps)
}

pub fn write_peaks_csv(w: &mut (impl Write + ?Sized), peaks: &PeakList<f64>) -> Result<()> {
    write_rows(w, &["index"], peaks.indices().iter().map(|i| vec![i.to_string()]))
}

pub fn write_ipi_csv(w: &mut (impl Write + ?Sized), ipi: &IpiSequence<f64>) -> Result<()> {
    write_rows(w, &["seconds"], ipi.intervals().iter().map(|v| vec![v.to_string()]))
}

pub fn read_ipi_csv(r: impl Read) -> Result<IpiSequence<f64>> {
    IpiSequence::new(read_rows(r, &["seconds"])?.into_iter().map(|r| r[0]).collect())
}

/// One row per cycle, no header.
pub fn write_cycles_csv(w: &mut (impl Write + ?Sized), cycles: &CycleSet<f64>) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    for c in cycles.cycles() {
        wtr.write_record(c.iter().map(|v| v.to_string())).map_err(csv_err)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_cycles_csv(r: impl Read) -> Result<CycleSet<f64>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(r);
    let mut cycles = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_err)?;
        let line = rec.position().map_or(0, |p| p.line());
        cycles.push(rec.iter().map(|f| parse_f64(f, line)).collect::<Result<Vec<f64>>>()?);
    }
    let len = cycles.first().map_or(crate::pulse::CYCLE_LEN, Vec::len);
    CycleSet::new(cycles, len).map_err(|e| format_err(e.to_string()))
}

/// One `0`/`1` string per line.
pub fn write_bit_lines<S: AsRef<str>>(w: &mut (impl Write + ?Sized), lines: &[S]) -> Result<()> {
    for l in lines {
        writeln!(w, "{}", l.as_ref())?;
    }
    Ok(())
}

pub fn read_bit_lines(r: impl Read) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for line in BufReader::new(r).lines() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        if !t.bytes().all(|b| b == b'0' || b == b'1') {
            return Err(Error::MalformedBits(t.to_string()));
        }
        out.push(t.to_string());
    }
    Ok(out)
}

/// Writes to a sibling temporary file and renames it over `path`, so readers
/// never observe a partial file.
pub fn write_atomic(path: &Path, f: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().ok_or_else(|| Error::Io(format!("{} is not a file path", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let result = (|| {
        let mut file = io::BufWriter::new(fs::File::create(&tmp)?);
        f(&mut file)?;
        file.into_inner().map_err(|e| Error::from(e.into_error()))?.sync_all()?;
        fs::rename(&tmp, path)?;
        Ok(())
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}

pub fn open(path: &Path) -> Result<BufReader<fs::File>> {
    fs::File::open(path).map(BufReader::new).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}
