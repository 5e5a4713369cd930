use std::io::{self, Read, Write};

use num_complex::Complex64;

use crate::model::{ComplexMatrix2, SystemConfig, TimeGrid};

use super::trajectory::{Method, PropagatorTrajectory};

/// Leading bytes of the binary trajectory format.
pub const MAGIC: [u8; 8] = *b"CROWTRJ\0";
pub const FORMAT_VERSION: u32 = 1;

pub const CSV_HEADER: &str = "t,re_mu11,im_mu11,re_mu12,im_mu12,re_mu21,im_mu21,re_mu22,im_mu22";

/// Writes `t` and the real and imaginary parts of the four entries per row,
/// in the trajectory's rotating frame.
pub fn write_csv(traj: &PropagatorTrajectory, mut out: impl Write) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for (k, m) in traj.samples().iter().enumerate() {
        write!(out, "{:.16e}", traj.time(k))?;
        for z in m.entries() {
            write!(out, ",{:.16e},{:.16e}", z.re, z.im)?;
        }
        writeln!(out)?;
    }
    Ok(())
}

/// Little-endian binary dump: magic, version, method, frame, grid, config,
/// then eight `f64` per sample.
pub fn write_binary(traj: &PropagatorTrajectory, mut out: impl Write) -> io::Result<()> {
    out.write_all(&MAGIC)?;
    out.write_all(&FORMAT_VERSION.to_le_bytes())?;
    out.write_all(&[traj.method().code()])?;
    let grid = traj.grid();
    let c = traj.config();
    for v in [traj.frame_frequency(), grid.t0, grid.dt] {
        out.write_all(&v.to_le_bytes())?;
    }
    out.write_all(&(grid.n_steps as u64).to_le_bytes())?;
    for v in [c.omega0, c.xi0, c.omega_c1, c.omega_c2, c.xi1, c.xi2] {
        out.write_all(&v.to_le_bytes())?;
    }
    out.write_all(&c.n1.to_le_bytes())?;
    out.write_all(&c.n2.to_le_bytes())?;
    for v in [c.r1, c.r2] {
        out.write_all(&v.to_le_bytes())?;
    }
    for m in traj.samples() {
        for z in m.entries() {
            out.write_all(&z.re.to_le_bytes())?;
            out.write_all(&z.im.to_le_bytes())?;
        }
    }
    Ok(())
}

fn invalid(msg: impl Into<String>) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, msg.into())
}

struct Reader<R> {
    inner: R,
}

impl<R: Read> Reader<R> {
    fn bytes<const N: usize>(&mut self) -> io::Result<[u8; N]> {
        let mut buf = [0u8; N];
        self.inner.read_exact(&mut buf)?;
        Ok(buf)
    }

    fn f64(&mut self) -> io::Result<f64> {
        Ok(f64::from_le_bytes(self.bytes()?))
    }

    fn u32(&mut self) -> io::Result<u32> {
        Ok(u32::from_le_bytes(self.bytes()?))
    }
}

/// Reads a trajectory written by [`write_binary`].
pub fn read_binary(input: impl Read) -> io::Result<PropagatorTrajectory> {
    let mut r = Reader { inner: input };
    if r.bytes::<8>()? != MAGIC {
        return Err(invalid("not a trajectory file"));
    }
    let version = r.u32()?;
    if version != FORMAT_VERSION {
        return Err(invalid(format!("unsupported format version {version}")));
    }
    let [code] = r.bytes::<1>()?;
    let method = Method::from_code(code).ok_or_else(|| invalid(format!("unknown method code {code}")))?;
    let frame = r.f64()?;
    let t0 = r.f64()?;
    let dt = r.f64()?;
    let n_steps = u64::from_le_bytes(r.bytes()?) as usize;
    let mut grid = TimeGrid::new(dt, n_steps).map_err(|e| invalid(e.to_string()))?;
    grid.t0 = t0;
    let config = SystemConfig {
        omega0: r.f64()?,
        xi0: r.f64()?,
        omega_c1: r.f64()?,
        omega_c2: r.f64()?,
        xi1: r.f64()?,
        xi2: r.f64()?,
        n1: r.u32()?,
        n2: r.u32()?,
        r1: r.f64()?,
        r2: r.f64()?,
    };
    let mut samples = Vec::with_capacity(n_steps.min(1 << 24) + 1);
    for _ in 0..=n_steps {
        let mut z = [Complex64::new(0.0, 0.0); 4];
        for e in &mut z {
            *e = Complex64::new(r.f64()?, r.f64()?);
        }
        samples.push(ComplexMatrix2::new(z[0], z[1], z[2], z[3]));
    }
    if r.inner.read(&mut [0u8; 1])? != 0 {
        return Err(invalid("trailing bytes after last sample"));
    }
    Ok(PropagatorTrajectory::new(config, grid, frame, method, samples))
}
