//! Supercover line tracing: visits every pixel the continuous segment
//! between two pixel centers passes through. Integer arithmetic only, and
//! the visited set is a geometric property of the segment, so it is
//! symmetric under endpoint swap and axis mirroring by construction.

/// Calls `plot(x, y)` for every pixel on the segment from (x0,y0) to
/// (x1,y1), endpoints included. When the segment crosses a grid corner
/// exactly, both side pixels are plotted as well, keeping the path
/// 4-connected.
pub(crate) fn supercover_line<F: FnMut(i64, i64)>(
    x0: i64,
    y0: i64,
    x1: i64,
    y1: i64,
    mut plot: F,
) {
    let dx = (x1 - x0).abs();
    let dy = (y1 - y0).abs();
    let sx = (x1 - x0).signum();
    let sy = (y1 - y0).signum();

    let (mut x, mut y) = (x0, y0);
    plot(x, y);

    // ix/iy count boundary crossings taken along each axis. The next
    // crossing along x happens at segment parameter (ix + 1/2)/dx, along y
    // at (iy + 1/2)/dy; cross-multiplying compares them in integers.
    let (mut ix, mut iy) = (0i64, 0i64);
    while ix < dx || iy < dy {
        let decision = (1 + 2 * ix) * dy - (1 + 2 * iy) * dx;
        if decision == 0 {
            // Exact corner crossing: step diagonally, plotting both side
            // pixels so the path stays 4-connected.
            plot(x + sx, y);
            plot(x, y + sy);
            x += sx;
            y += sy;
            ix += 1;
            iy += 1;
        } else if decision < 0 {
            x += sx;
            ix += 1;
        } else {
            y += sy;
            iy += 1;
        }
        plot(x, y);
    }
}
