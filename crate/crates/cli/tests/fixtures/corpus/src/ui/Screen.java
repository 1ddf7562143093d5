package ui;

/** Double-buffered screen. */
public class Screen {
    private int[] pixels;
    private Canvas canvas;

    public void drawFrame() {
        canvas.paintShapes();
        swapBuffers();
    }

    private void swapBuffers() {
        // copy the back buffer pixels to the window
    }
}
